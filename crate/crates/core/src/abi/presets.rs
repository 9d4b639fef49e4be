//! ABI documents and role mappings shipped with the crate.

pub const ERC20_ABI: &str = include_str!("../../assets/abi/erc20.json");

pub const GOVERNOR_ALPHA_ABI: &str = include_str!("../../assets/abi/governor_alpha.json");
pub const GOVERNOR_BRAVO_ABI: &str = include_str!("../../assets/abi/governor_bravo.json");
pub const OZ_GOVERNOR_ABI: &str = include_str!("../../assets/abi/oz_governor.json");

const GOVERNOR_ALPHA_MAPPING: &str = include_str!("../../assets/mappings/governor_alpha.json");
const GOVERNOR_BRAVO_MAPPING: &str = include_str!("../../assets/mappings/governor_bravo.json");
const OZ_GOVERNOR_MAPPING: &str = include_str!("../../assets/mappings/oz_governor.json");

pub const PRESET_NAMES: [&str; 3] = ["governor_alpha", "governor_bravo", "oz_governor"];

/// `(abi, mapping)` document pair for a preset name.
pub fn governance(name: &str) -> Option<(&'static str, &'static str)> {
    match name {
        "governor_alpha" => Some((GOVERNOR_ALPHA_ABI, GOVERNOR_ALPHA_MAPPING)),
        "governor_bravo" => Some((GOVERNOR_BRAVO_ABI, GOVERNOR_BRAVO_MAPPING)),
        "oz_governor" => Some((OZ_GOVERNOR_ABI, OZ_GOVERNOR_MAPPING)),
        _ => None,
    }
}
