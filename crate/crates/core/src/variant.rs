//! Named weakened variants of the compression function.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::ExpansionKind;

/// Upper bound on the step count of any variant.
pub const MAX_STEPS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SboxMode {
    Standard,
    /// Σ0, Σ1 (and, through the expansion kind, σ0, σ1) replaced by the identity.
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoolMode {
    Standard,
    /// Maj and Ch both replaced by `x + y + z mod 2^32`.
    ModularAdd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariantConfig {
    pub sbox_mode: SboxMode,
    pub bool_mode: BoolMode,
    pub expansion_kind: ExpansionKind,
    pub steps: usize,
    pub feed_forward: bool,
}

/// The four presets understood by [`make_variant`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VariantName {
    Standard,
    AddLinear,
    NoSbox,
    XorExpansion,
}

impl VariantName {
    pub const ALL: [VariantName; 4] = [
        VariantName::Standard,
        VariantName::AddLinear,
        VariantName::NoSbox,
        VariantName::XorExpansion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VariantName::Standard => "standard",
            VariantName::AddLinear => "add_linear",
            VariantName::NoSbox => "no_sbox",
            VariantName::XorExpansion => "xor_expansion",
        }
    }

    pub fn config(self) -> VariantConfig {
        use ExpansionKind::*;
        let (sbox_mode, bool_mode, expansion_kind) = match self {
            VariantName::Standard => (SboxMode::Standard, BoolMode::Standard, Sha256Add),
            VariantName::AddLinear => (
                SboxMode::Identity,
                BoolMode::ModularAdd,
                Sha256AddIdentitySigma,
            ),
            VariantName::NoSbox => (
                SboxMode::Identity,
                BoolMode::Standard,
                Sha256AddIdentitySigma,
            ),
            VariantName::XorExpansion => (SboxMode::Standard, BoolMode::Standard, Sha256Xor),
        };
        VariantConfig {
            sbox_mode,
            bool_mode,
            expansion_kind,
            steps: 64,
            feed_forward: true,
        }
    }
}

impl fmt::Display for VariantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        VariantName::ALL
            .into_iter()
            .find(|v| v.as_str() == norm)
            .ok_or_else(|| Error::UnknownVariant(s.to_string()))
    }
}

/// Looks up a preset by name.
pub fn make_variant(name: &str) -> Result<VariantConfig> {
    Ok(name.parse::<VariantName>()?.config())
}

impl VariantConfig {
    /// Builds a configuration from explicit flags, checking the step range
    /// and that the expansion is a SHA-256 recurrence.
    pub fn from_flags(
        sbox_mode: SboxMode,
        bool_mode: BoolMode,
        expansion_kind: ExpansionKind,
        steps: usize,
        feed_forward: bool,
    ) -> Result<Self> {
        let cfg = VariantConfig {
            sbox_mode,
            bool_mode,
            expansion_kind,
            steps,
            feed_forward,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.steps > MAX_STEPS {
            return Err(Error::StepsOutOfRange(self.steps));
        }
        if self.expansion_kind.is_sha1() {
            return Err(Error::InvalidConfig(format!(
                "{} is not a SHA-256 message expansion",
                self.expansion_kind
            )));
        }
        Ok(())
    }

    pub fn with_steps(mut self, steps: usize) -> Result<Self> {
        self.steps = steps;
        self.validate()?;
        Ok(self)
    }

    /// Every operation is linear over the integers modulo 2^32.
    pub fn is_add_linear(&self) -> bool {
        self.sbox_mode == SboxMode::Identity
            && self.bool_mode == BoolMode::ModularAdd
            && self.expansion_kind == ExpansionKind::Sha256AddIdentitySigma
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: VariantConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let al = make_variant("add_linear").unwrap();
        assert_eq!(
            al,
            VariantConfig {
                sbox_mode: SboxMode::Identity,
                bool_mode: BoolMode::ModularAdd,
                expansion_kind: ExpansionKind::Sha256AddIdentitySigma,
                steps: 64,
                feed_forward: true
            }
        );
        assert!(al.is_add_linear());
        let ns = make_variant("no_sbox").unwrap();
        assert_eq!(
            (ns.sbox_mode, ns.bool_mode),
            (SboxMode::Identity, BoolMode::Standard)
        );
        assert_eq!(ns.expansion_kind, ExpansionKind::Sha256AddIdentitySigma);
        let st = make_variant("standard").unwrap();
        assert_eq!(
            (st.sbox_mode, st.bool_mode, st.expansion_kind),
            (
                SboxMode::Standard,
                BoolMode::Standard,
                ExpansionKind::Sha256Add
            )
        );
        assert_eq!(
            make_variant("xor_expansion").unwrap().expansion_kind,
            ExpansionKind::Sha256Xor
        );
        assert!(matches!(
            make_variant("sha3"),
            Err(Error::UnknownVariant(_))
        ));
    }

    #[test]
    fn deterministic_and_total() {
        for v in VariantName::ALL {
            assert_eq!(
                make_variant(v.as_str()).unwrap(),
                make_variant(v.as_str()).unwrap()
            );
        }
    }

    #[test]
    fn json_round_trip_and_schema() {
        let cfg = make_variant("no_sbox").unwrap();
        let js = cfg.to_json().unwrap();
        assert_eq!(
            js,
            r#"{"sbox_mode":"identity","bool_mode":"standard","expansion_kind":"sha256_add_identity_sigma","steps":64,"feed_forward":true}"#
        );
        assert_eq!(VariantConfig::from_json(&js).unwrap(), cfg);
    }

    #[test]
    fn step_range_enforced() {
        let cfg = make_variant("standard").unwrap();
        assert!(cfg.with_steps(128).is_ok());
        assert!(matches!(
            cfg.with_steps(129),
            Err(Error::StepsOutOfRange(129))
        ));
        assert!(matches!(cfg.with_steps(0), Err(Error::StepsOutOfRange(0))));
        assert!(VariantConfig::from_flags(
            SboxMode::Standard,
            BoolMode::Standard,
            ExpansionKind::Sha1Xor,
            64,
            true
        )
        .is_err());
    }
}
