//! Generator-encoded logs for the decoder round trip, and hand-broken logs
//! the decoders must reject.

use daokpi_core::abi::presets::PRESET_NAMES;
use daokpi_core::abi::{decode_log, encode_log, erc20_decoder, event_topic, AbiValue, GovernanceInterface, LogDecoder};
use daokpi_core::chain::RawLog;
use daokpi_core::primitives::H256;
use daokpi_core::synth::{generate, random_spec, SynthDao};

pub const ROUND_TRIP_LOGS: usize = 1000;

/// Nine DAOs with the governance frameworks assigned in turn.
pub fn sample_daos() -> Vec<SynthDao> {
    (0..9)
        .map(|i| {
            let mut spec = random_spec(4242 + i as u64);
            spec.framework = PRESET_NAMES[i % PRESET_NAMES.len()].to_string();
            generate(&format!("rt-{i}"), &spec).expect("spec")
        })
        .collect()
}

pub struct Sample {
    pub framework: String,
    pub is_token: bool,
    pub log: RawLog,
}

/// `n` logs drawn round-robin from the governance and token streams of
/// [`sample_daos`].
pub fn samples(n: usize) -> Vec<Sample> {
    let daos = sample_daos();
    let mut iters: Vec<Box<dyn Iterator<Item = (&SynthDao, &RawLog)>>> = daos
        .iter()
        .flat_map(|d| {
            let gov = d.logs.iter().filter(move |l| l.address != d.token).map(move |l| (d, l));
            let token = d.logs.iter().filter(move |l| l.address == d.token).map(move |l| (d, l));
            [Box::new(gov) as Box<dyn Iterator<Item = _>>, Box::new(token)]
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let before = out.len();
        for it in &mut iters {
            if let Some((d, l)) = it.next() {
                out.push(Sample {
                    framework: d.spec.framework.clone(),
                    is_token: l.address == d.token,
                    log: l.clone(),
                });
                if out.len() == n {
                    break;
                }
            }
        }
        assert!(out.len() > before, "corpus has fewer than {n} logs");
    }
    out
}

pub fn decoder_for(s: &Sample) -> LogDecoder {
    if s.is_token {
        erc20_decoder()
    } else {
        GovernanceInterface::preset(&s.framework).expect("preset").decoder()
    }
}

/// Decodes and re-encodes `s.log`; `Ok(true)` when topics and data come
/// back byte-identical.
pub fn round_trips(s: &Sample, dec: &LogDecoder) -> Result<bool, String> {
    let topic0 = s.log.topics.first().ok_or("no topic")?;
    let spec = dec.spec_for(topic0).ok_or("unknown topic")?;
    let ev = decode_log(spec, &s.log).map_err(|e| e.to_string())?;
    let values: Vec<AbiValue> = ev.params.into_iter().map(|p| p.value).collect();
    let (topics, data) = encode_log(spec, &values).map_err(|e| e.to_string())?;
    Ok(topics == s.log.topics && data == s.log.data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Malformed,
    UnknownEvent,
}

pub struct BrokenLog {
    pub name: &'static str,
    pub token: bool,
    pub log: RawLog,
    pub expect: Expect,
}

fn word(v: u64) -> [u8; 32] {
    let mut w = [0u8; 32];
    w[24..].copy_from_slice(&v.to_be_bytes());
    w
}

fn set_word(data: &mut [u8], index: usize, w: [u8; 32]) {
    data[index * 32..(index + 1) * 32].copy_from_slice(&w);
}

fn find(daos: &[SynthDao], framework: &str, event: &str) -> RawLog {
    let iface = GovernanceInterface::preset(framework).expect("preset");
    let topic = event_topic(iface.spec(event).expect("event"));
    daos.iter()
        .filter(|d| d.spec.framework == framework)
        .flat_map(|d| &d.logs)
        .find(|l| l.topics.first() == Some(&topic))
        .cloned()
        .expect("corpus carries the event")
}

/// Corrupted copies of valid `VoteCast` and `Transfer` logs. Bravo's
/// `VoteCast(address indexed voter, uint256 proposalId, uint8 support,
/// uint256 votes, string reason)` keeps the voter in topic 1 and lays out
/// `data` as proposalId, support, votes, the string offset, then the
/// string length and bytes.
pub fn broken_logs() -> Vec<BrokenLog> {
    let daos = sample_daos();
    let bravo = daos.iter().find(|d| d.spec.framework == "governor_bravo").expect("bravo DAO");
    let vote = find(&daos, "governor_bravo", "VoteCast");
    let transfer = bravo.logs.iter().find(|l| l.address == bravo.token).cloned().expect("transfer");

    let mut out = Vec::new();
    let mut add = |name, token, log, expect| out.push(BrokenLog { name, token, log, expect });
    let with = |f: &dyn Fn(&mut RawLog)| {
        let mut l = vote.clone();
        f(&mut l);
        l
    };

    add(
        "vote data missing its last byte",
        false,
        with(&|l| {
            l.data.pop();
        }),
        Expect::Malformed,
    );
    add("vote data empty", false, with(&|l| l.data.clear()), Expect::Malformed);
    add("vote data cut inside the head", false, with(&|l| l.data.truncate(70)), Expect::Malformed);
    add("support exceeds uint8", false, with(&|l| set_word(&mut l.data, 1, word(300))), Expect::Malformed);
    add("string offset past end", false, with(&|l| set_word(&mut l.data, 3, word(0xffff))), Expect::Malformed);
    add("string offset overflows", false, with(&|l| set_word(&mut l.data, 3, [0xff; 32])), Expect::Malformed);
    add("string length past end", false, with(&|l| set_word(&mut l.data, 4, word(1 << 40))), Expect::Malformed);
    add("voter topic with dirty high bytes", false, with(&|l| l.topics[1].0[0] = 0x01), Expect::Malformed);
    add("extra topic", false, with(&|l| l.topics.push(H256([7; 32]))), Expect::Malformed);
    add(
        "voter topic missing",
        false,
        with(&|l| {
            l.topics.pop();
        }),
        Expect::Malformed,
    );
    add("unknown signature", false, with(&|l| l.topics[0] = H256([0xab; 32])), Expect::UnknownEvent);
    add("no topics", false, with(&|l| l.topics.clear()), Expect::UnknownEvent);

    let mut t = transfer.clone();
    t.topics.pop();
    add("transfer without recipient topic", true, t, Expect::Malformed);
    let mut t = transfer.clone();
    t.data.truncate(31);
    add("transfer amount truncated", true, t, Expect::Malformed);
    let mut t = transfer.clone();
    t.data.clear();
    add("transfer amount missing", true, t, Expect::Malformed);
    let mut t = transfer;
    t.topics[2].0[3] = 0xee;
    add("transfer recipient with dirty high bytes", true, t, Expect::Malformed);
    out
}

/// Decodes and re-encodes `n` sampled logs; lists the ones that differ.
pub fn round_trip_failures(n: usize) -> Vec<String> {
    samples(n)
        .iter()
        .enumerate()
        .filter_map(|(i, x)| match round_trips(x, &decoder_for(x)) {
            Ok(true) => None,
            Ok(false) => Some(format!("#{i}: re-encoding differs")),
            Err(e) => Some(format!("#{i}: {e}")),
        })
        .collect()
}

/// Feeds every broken log to its decoder, singly and as a batch, and
/// requires each to be dropped under the expected category. Returns the
/// number of broken logs.
pub fn check_broken() -> Result<usize, String> {
    let broken = broken_logs();
    let gov = GovernanceInterface::preset("governor_bravo").map_err(|e| e.to_string())?.decoder();
    let token = erc20_decoder();
    for b in &broken {
        let dec = if b.token { &token } else { &gov };
        let (events, report) = dec.decode_all(std::slice::from_ref(&b.log));
        let c = report.total();
        let counted = match b.expect {
            Expect::Malformed => c.malformed,
            Expect::UnknownEvent => c.unknown_event,
        };
        if !events.is_empty() || !c.is_balanced() || counted != 1 {
            return Err(format!("{}: {} events, {c:?}", b.name, events.len()));
        }
    }
    for (dec, is_token) in [(&gov, false), (&token, true)] {
        let logs: Vec<RawLog> = broken.iter().filter(|b| b.token == is_token).map(|b| b.log.clone()).collect();
        let (events, report) = dec.decode_all(&logs);
        if !events.is_empty() || report.total().dropped() != logs.len() as u64 {
            return Err(format!("batch of {} broken logs not all dropped", logs.len()));
        }
    }
    Ok(broken.len())
}
