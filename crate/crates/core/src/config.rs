/// Caps that keep every computation at desk scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest `b^k` for which an occurrence table is stored densely.
    pub dense_cap: u64,
    /// Largest number of prefixes `b^L` a bad-set enumeration may visit.
    pub enumeration_cap: u64,
    /// Largest `b^k` for a generated de Bruijn cycle.
    pub debruijn_cap: u64,
    /// Largest position a construction schedule may reach.
    pub max_positions: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            dense_cap: 1 << 26,
            enumeration_cap: 1 << 24,
            debruijn_cap: 1 << 26,
            max_positions: 1 << 30,
        }
    }
}

impl Limits {
    /// Default limits, with the dense cap taken from `PG_DENSE_CAP` when set.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(cap) = std::env::var("PG_DENSE_CAP")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            limits.dense_cap = cap;
        }
        limits
    }
}
