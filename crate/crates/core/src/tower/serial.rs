use serde::{Deserialize, Serialize};

use super::{build_tower_with_capacity, GeneratorRef, Tower};
use crate::error::{Error, Result};
use crate::linalg::MonomialMatrix;
use crate::presentation::AlgebraSpec;
use crate::weyl::Family;

/// One generator: column `c` holds `exp(2πi·phase[c]/modulus)` in row `perm[c]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRecord {
    pub family: Family,
    pub summand: Option<usize>,
    pub level: usize,
    pub perm: Vec<Option<u32>>,
    pub phase: Vec<u32>,
}

/// On-disk tower. All phases share the file-level `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerFile {
    pub spec: AlgebraSpec,
    pub depth: usize,
    pub modulus: u32,
    pub ambient_dim: usize,
    pub generators: Vec<GeneratorRecord>,
}

impl TowerFile {
    pub fn from_tower(tower: &Tower) -> TowerFile {
        let modulus = tower.modulus();
        let generators = tower
            .generator_refs()
            .iter()
            .map(|g| {
                let m = tower.resolve(g).expect("own generator").lifted(modulus);
                let (perm, phase) = m.raw_parts();
                GeneratorRecord {
                    family: g.family,
                    summand: (g.family != Family::R).then_some(g.summand),
                    level: g.level,
                    perm,
                    phase: phase.to_vec(),
                }
            })
            .collect();
        TowerFile {
            spec: tower.spec().clone(),
            depth: tower.depth(),
            modulus,
            ambient_dim: tower.ambient_dim(),
            generators,
        }
    }

    /// Rebuilds the tower from its spec and checks every stored generator against it.
    pub fn to_tower(&self, capacity: u128) -> Result<Tower> {
        let tower = build_tower_with_capacity(&self.spec, self.depth, capacity)?;
        if tower.modulus() != self.modulus || tower.ambient_dim() != self.ambient_dim {
            return Err(Error::MalformedTower(format!(
                "header (modulus {}, dim {}) does not match the spec (modulus {}, dim {})",
                self.modulus,
                self.ambient_dim,
                tower.modulus(),
                tower.ambient_dim()
            )));
        }
        let expected = tower.generator_refs().len();
        if self.generators.len() != expected {
            return Err(Error::MalformedTower(format!("{} generators, expected {expected}", self.generators.len())));
        }
        for rec in &self.generators {
            let g = GeneratorRef::new(rec.family, rec.summand.unwrap_or(0), rec.level);
            let stored = MonomialMatrix::from_raw(self.modulus, rec.perm.clone(), rec.phase.clone())?;
            if stored.dim() != self.ambient_dim {
                return Err(Error::MalformedTower(format!("{g} has dimension {}", stored.dim())));
            }
            if tower.resolve(&g)? != stored {
                return Err(Error::MalformedTower(format!("{g} differs from the construction")));
            }
        }
        Ok(tower)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tower serializes")
    }

    pub fn from_json(text: &str) -> Result<TowerFile> {
        serde_json::from_str(text).map_err(|e| Error::MalformedTower(e.to_string()))
    }
}
