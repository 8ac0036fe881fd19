//! Set references, state strings and structure files.

use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ksverify::{catalog_by_name, BasisMode, ObservableKsSet, ProjectorKsSet};
use crate::meanking::yu_oh_rays;
use crate::orbit::{arch_structure, square3_structure, wheel_structure, AbstractKsStructure};
use crate::ppsengine::{PpsPair, PpsState};
use crate::stabilizer::{complete_to_pure, StabilizerProjector};

/// A resolved `--set` argument.
#[derive(Clone, Debug)]
pub enum SetSource {
    Observables(ObservableKsSet),
    Rays { name: String, rays: Vec<Vec<C64>> },
}

/// Raw vectors on disk: each amplitude is `[re, im]` or a bare real.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RayFile {
    pub name: String,
    pub rays: Vec<Vec<Amplitude>>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Amplitude> for C64 {
    fn from(a: Amplitude) -> C64 {
        match a {
            Amplitude::Real(r) => C64::new(r, 0.0),
            Amplitude::Complex([re, im]) => C64::new(re, im),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Catalog name, `yu_oh`, or a JSON file holding an observable set or rays.
pub fn load_set(reference: &str) -> Result<SetSource> {
    if reference == "yu_oh" {
        return Ok(SetSource::Rays { name: "yu_oh".into(), rays: yu_oh_rays() });
    }
    let path = Path::new(reference);
    if !path.exists() {
        return catalog_by_name(reference).map(SetSource::Observables);
    }
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Input(format!("{reference}: {e}")))?;
    if value.get("rays").is_some() {
        let f: RayFile = serde_json::from_value(value).map_err(|e| Error::Input(format!("{reference}: {e}")))?;
        let rays = f.rays.into_iter().map(|r| r.into_iter().map(C64::from).collect()).collect();
        Ok(SetSource::Rays { name: f.name, rays })
    } else {
        serde_json::from_value(value).map(SetSource::Observables).map_err(|e| Error::Input(format!("{reference}: {e}")))
    }
}

impl SetSource {
    pub fn name(&self) -> &str {
        match self {
            SetSource::Observables(s) => &s.name,
            SetSource::Rays { name, .. } => name,
        }
    }

    pub fn projector_set(&self, hybrids: bool) -> Result<ProjectorKsSet> {
        match self {
            SetSource::Observables(s) => {
                let mode = if hybrids { BasisMode::WithHybrids } else { BasisMode::Eigen };
                ProjectorKsSet::from_observable_set(s, mode)
            }
            SetSource::Rays { name, rays } => ProjectorKsSet::from_rays(name.clone(), rays.clone()),
        }
    }
}

/// A state given either as signed generators (`+XIX,+XXI`) or as amplitudes
/// (`1,0,0` or `0.5+0.5i,...`).
///
/// Generator lists that leave a degenerate space are completed with
/// single-qubit observables; the returned note says so.
pub fn parse_state(text: &str) -> Result<(PpsState, Option<String>)> {
    let first = text.split(',').map(str::trim).find(|s| !s.is_empty()).ok_or_else(|| Error::Input("empty state".into()))?;
    let is_pauli = first.trim_start_matches(['+', '-']).chars().all(|c| "IXYZ".contains(c));
    if !is_pauli {
        let v = text.split(',').map(|s| parse_complex(s.trim())).collect::<Result<Vec<_>>>()?;
        return Ok((PpsState::Vector(v), None));
    }
    let p = StabilizerProjector::parse(text)?;
    if p.is_pure() {
        return Ok((PpsState::Stabilizer(p), None));
    }
    match complete_to_pure(&p) {
        Some(c) => {
            let note = format!("completed {p} to the pure state {c}");
            Ok((PpsState::Stabilizer(c), Some(note)))
        }
        None => Err(Error::NotPure(p.rank())),
    }
}

pub fn parse_pps(pre: &str, post: &str) -> Result<(PpsPair, Vec<String>)> {
    let (a, na) = parse_state(pre)?;
    let (b, nb) = parse_state(post)?;
    Ok((PpsPair::new(a, b)?, na.into_iter().chain(nb).collect()))
}

/// `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::Input(format!("cannot parse amplitude {s:?}"));
    let s = s.replace(' ', "");
    if let Some(body) = s.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(k, c)| (c == '+' || c == '-') && !body[..k].ends_with(['e', 'E']))
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse().map_err(|_| bad())?,
        };
        Ok(C64::new(re.parse().map_err(|_| bad())?, im))
    } else {
        Ok(C64::new(s.parse().map_err(|_| bad())?, 0.0))
    }
}

/// `square3`, `wheelN`, `arch`, or a structure JSON file.
pub fn load_structure(reference: &str) -> Result<AbstractKsStructure> {
    let path = Path::new(reference);
    if path.exists() {
        let text = read(path)?;
        return serde_json::from_str(&text).map_err(|e| Error::Input(format!("{reference}: {e}")));
    }
    match reference {
        "square3" => square3_structure(),
        "arch" => Ok(arch_structure()),
        r => match r.strip_prefix("wheel").and_then(|n| n.trim_matches(['(', ')', ':']).parse().ok()) {
            Some(n) => wheel_structure(n),
            None => Err(Error::Input(format!("unknown structure {reference:?} (square3, wheelN, arch or a file)"))),
        },
    }
}

/// Observable lists separated by `;` or `,`.
pub fn parse_steps(text: &str) -> Result<Vec<crate::pauli::PauliObservable>> {
    text.split([';', ',']).map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1").unwrap(), C64::new(1.0, 0.0));
        assert_eq!(parse_complex("0.5-0.25i").unwrap(), C64::new(0.5, -0.25));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("1e-3+1e-2i").unwrap(), C64::new(1e-3, 1e-2));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn state_completion_note() {
        let (s, note) = parse_state("+XIX,+XXI,+IXX").unwrap();
        assert!(note.is_some());
        assert!(matches!(s, PpsState::Stabilizer(p) if p.is_pure()));
        let (v, none) = parse_state("1,0").unwrap();
        assert!(none.is_none());
        assert!(matches!(v, PpsState::Vector(_)));
    }
}
