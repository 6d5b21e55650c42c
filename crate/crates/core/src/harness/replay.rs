use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use crate::config::{apply_word, pgl_equivalent, AnyConfig, ConfigFile};
use crate::curve::{QuadricPencil, RestrictionMap};
use crate::lattice::LatticeVector;
use crate::weyl::WeylWord;

use super::trial_rng;

/// Everything needed to re-check a recorded violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// A nonidentity word that fixed a configuration up to projectivity.
    Coble { word: WeylWord, config: ConfigFile },
    /// A nonzero class with trivial restriction to the base curve.
    Restriction { prime: u64, pencil: QuadricPencil, config: ConfigFile, divisor: Vec<i64> },
}

/// Re-verifies a witness from its recorded data alone. Returns whether the
/// recorded violation reproduces.
pub fn replay(witness: &Witness) -> Result<bool> {
    match witness {
        Witness::Coble { word, config } => match config.parse()? {
            AnyConfig::Rational(c) => Ok(pgl_equivalent(&apply_word(word, &c)?, &c)?),
            AnyConfig::Prime(c) => Ok(pgl_equivalent(&apply_word(word, &c)?, &c)?),
        },
        Witness::Restriction { prime, pencil, config, divisor } => {
            let AnyConfig::Prime(c) = config.parse()? else {
                bail!("restriction witnesses live over a prime field");
            };
            if c.field.modulus() != *prime {
                bail!("witness prime {prime} does not match the configuration field");
            }
            // triviality of a class does not depend on the model's random choices
            let map = RestrictionMap::build(&c, pencil, &mut trial_rng(0, 0))?;
            let class = map.tr_class(&LatticeVector::from_i64s(divisor))?;
            Ok(map.is_trivial(&class))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::random_config;
    use crate::curve::{plant_collision, sample_vr_config};
    use crate::field::PrimeField;

    #[test]
    fn coble_witnesses() {
        let f = PrimeField::new(10007).unwrap();
        let c = random_config(&f, 8, &mut trial_rng(2, 0)).unwrap();
        let trivial = Witness::Coble { word: "s t4 s t4 s t4".parse().unwrap(), config: c.to_file() };
        assert!(replay(&trivial).unwrap());
        let moving = Witness::Coble { word: "s".parse().unwrap(), config: c.to_file() };
        assert!(!replay(&moving).unwrap());
        let json = serde_json::to_string(&trivial).unwrap();
        assert!(json.starts_with(r#"{"type":"coble","word":"s t4 s t4 s t4""#));
        assert_eq!(serde_json::from_str::<Witness>(&json).unwrap(), trivial);
    }

    #[test]
    fn planted_restriction_witness_replays() {
        let f = PrimeField::new(1_000_000_007).unwrap();
        let mut rng = trial_rng(3, 0);
        let vr = sample_vr_config(&f, 8, &mut rng).unwrap();
        let map = RestrictionMap::build(&vr.config, &vr.pencil, &mut rng).unwrap();
        let (planted, witness) = plant_collision(&map, &vr.config).unwrap();
        let divisor = witness.to_i64s().unwrap();
        let w = Witness::Restriction { prime: 1_000_000_007, pencil: vr.pencil, config: planted.to_file(), divisor };
        assert!(replay(&w).unwrap());
        let honest = Witness::Restriction {
            prime: 1_000_000_007,
            pencil: vr.pencil,
            config: vr.config.to_file(),
            divisor: witness.to_i64s().unwrap(),
        };
        assert!(!replay(&honest).unwrap());
    }
}
