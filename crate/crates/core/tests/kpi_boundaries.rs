mod common;

use common::kpi_table;
use daokpi_core::kpi::{
    assess_decentralisation, assess_funds, assess_participation, assess_voting, composite, composite_centi,
    DecentralisationMetrics, Kpi, KpiResult, Level, ParticipationMetrics, TreasuryMetrics, VotingMetrics,
};
use proptest::prelude::*;

#[test]
fn boundary_table_agrees_with_hand_levels() {
    let cases = kpi_table::cases();
    assert_eq!(cases.len(), 40);
    for kpi in Kpi::ALL {
        assert!(cases.iter().filter(|c| c.kpi == kpi.name()).count() >= 9, "{kpi:?} under-covered");
    }
    let wrong: Vec<String> = cases
        .iter()
        .filter_map(|c| {
            let r = kpi_table::evaluate(c);
            (!kpi_table::agrees(c, &r)).then(|| format!("#{} {} {}: got {r:?}", c.id, c.kpi, c.case))
        })
        .collect();
    assert!(wrong.is_empty(), "{wrong:#?}");
}

#[test]
fn composite_extremes() {
    let low = [
        assess_participation(&ParticipationMetrics::new(0, 10)),
        assess_funds(&TreasuryMetrics { treasury_usd: Some(0.0), circulating_pct: Some(1.0) }),
        assess_voting(&VotingMetrics::new(0, &[1.0])),
        assess_decentralisation(&DecentralisationMetrics {
            largest_holder_share: Some(1.0),
            participation_level: Some(Level::Low),
            fully_automated: false,
        }),
    ];
    assert_eq!(composite_centi([&low[0], &low[1], &low[2], &low[3]]), Some(335));
    let high = [
        assess_participation(&ParticipationMetrics::new(10, 10)),
        assess_funds(&TreasuryMetrics { treasury_usd: Some(5e9), circulating_pct: Some(0.2) }),
        assess_voting(&VotingMetrics::new(9, &[7.0; 10])),
        assess_decentralisation(&DecentralisationMetrics {
            largest_holder_share: Some(0.01),
            participation_level: Some(Level::High),
            fully_automated: true,
        }),
    ];
    assert_eq!(composite([&high[0], &high[1], &high[2], &high[3]]), Some(12.0));
}

const SCORE_SETS: [(Kpi, &[u32]); 4] = [
    (Kpi::Participation, &[100, 200, 300]),
    (Kpi::Funds, &[75, 150, 225, 300]),
    (Kpi::Voting, &[100, 200, 300]),
    (Kpi::Decentralisation, &[60, 120, 180, 240, 300]),
];

fn level(r: &KpiResult) -> Level {
    r.level().expect("assessed")
}

fn participation_level() -> impl Strategy<Value = Option<Level>> {
    prop_oneof![Just(None), Just(Some(Level::Low)), Just(Some(Level::Medium)), Just(Some(Level::High))]
}

fn decentralisation(share: f64, p: Option<Level>, automated: bool) -> KpiResult {
    assess_decentralisation(&DecentralisationMetrics {
        largest_holder_share: Some(share),
        participation_level: p,
        fully_automated: automated,
    })
}

proptest! {
    #![proptest_config(common::proptest_config(256))]

    #[test]
    fn participation_monotone(total in 1u64..10_000, a in 0u64..20_000, b in 0u64..20_000) {
        let (lo, hi) = (a.min(b), a.max(b));
        let l1 = level(&assess_participation(&ParticipationMetrics::new(lo, total)));
        let l2 = level(&assess_participation(&ParticipationMetrics::new(hi, total)));
        prop_assert!(l1 <= l2);
    }

    #[test]
    fn funds_monotone_in_treasury(x in 0.0f64..1e11, y in 0.0f64..1e11, circ in 0.0f64..=1.0) {
        let (lo, hi) = (x.min(y), x.max(y));
        let f = |usd| level(&assess_funds(&TreasuryMetrics { treasury_usd: Some(usd), circulating_pct: Some(circ) }));
        prop_assert!(f(lo) <= f(hi));
    }

    #[test]
    fn funds_monotone_in_circulation(usd in 0.0f64..1e11, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let f = |c| level(&assess_funds(&TreasuryMetrics { treasury_usd: Some(usd), circulating_pct: Some(c) }));
        prop_assert!(f(a.min(b)) <= f(a.max(b)));
    }

    #[test]
    fn voting_monotone_in_approval(n in 1u64..200, a in 0u64..200, b in 0u64..200, days in 3.0f64..=14.0) {
        let (lo, hi) = (a.min(b).min(n), a.max(b).min(n));
        let f = |k| level(&assess_voting(&VotingMetrics::new(k, &vec![days; n as usize])));
        prop_assert!(f(lo) <= f(hi));
    }

    #[test]
    fn decentralisation_antitone_in_share(a in 0.0f64..=1.0, b in 0.0f64..=1.0, p in participation_level(), auto in any::<bool>()) {
        prop_assert!(level(&decentralisation(a.max(b), p, auto)) <= level(&decentralisation(a.min(b), p, auto)));
    }

    #[test]
    fn decentralisation_rewards_engagement(share in 0.0f64..=1.0, auto in any::<bool>()) {
        let low = level(&decentralisation(share, Some(Level::Low), auto));
        let high = level(&decentralisation(share, Some(Level::High), auto));
        prop_assert!(low <= high);
    }

    #[test]
    fn total_and_closed(
        active in 0u64..5_000, total in 1u64..5_000,
        usd in 0.0f64..1e11, circ in 0.0f64..=1.0,
        approved in 0u64..60, extra in 0u64..60, days in 0.0f64..60.0,
        share in 0.0f64..=1.0, auto in any::<bool>(),
    ) {
        let p = assess_participation(&ParticipationMetrics::new(active, total));
        let f = assess_funds(&TreasuryMetrics { treasury_usd: Some(usd), circulating_pct: Some(circ) });
        let n = approved + extra + 1;
        let v = assess_voting(&VotingMetrics::new(approved, &vec![days; n as usize]));
        let d = decentralisation(share, p.level(), auto);
        let results = [&p, &f, &v, &d];
        for ((kpi, allowed), r) in SCORE_SETS.iter().zip(results) {
            let score = r.score_centi();
            prop_assert!(score.is_some(), "{kpi:?} not assessed");
            prop_assert!(allowed.contains(&score.unwrap()), "{kpi:?} score {score:?}");
            prop_assert!(kpi.levels().contains(&r.level().unwrap()));
        }
        let c = composite_centi(results).unwrap();
        prop_assert_eq!(c, results.iter().map(|r| r.score_centi().unwrap()).sum::<u32>());
        prop_assert!((335..=1200).contains(&c));
    }
}
