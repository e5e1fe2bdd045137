//! JSON manifests describing a model and, optionally, a divisor.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sympsum_core::library::{cp2_blowup, s2_bundle};
use sympsum_core::{
    validate_model, CapKind, HomologyClass, IntersectionLattice, ManifoldModel, ModelFlags, SymplecticPair,
};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorSpec {
    pub vector: Vec<i64>,
    pub genus: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagSpec {
    #[serde(default)]
    pub rational: bool,
    #[serde(default)]
    pub ruled: bool,
    #[serde(default)]
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub basis: Vec<String>,
    pub gram: Vec<Vec<i64>>,
    #[serde(rename = "K")]
    pub canonical: Vec<i64>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<DivisorSpec>,
    #[serde(default)]
    pub flags: FlagSpec,
    /// Defaults to `2 + rank`, i.e. `b_1 = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<i64>,
    /// Defaults to the signature of the form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimal_known: Option<bool>,
    /// A cap name as accepted by `--cap`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<String>,
}

pub struct Loaded {
    pub manifest: Manifest,
    pub model: ManifoldModel,
    pub pair: Option<SymplecticPair>,
    pub cap: Option<CapKind>,
}

impl Loaded {
    pub fn require_pair(&self) -> Result<&SymplecticPair, CliError> {
        self.pair
            .as_ref()
            .ok_or_else(|| CliError::Domain(format!("manifest `{}` has no divisor V", self.manifest.name)))
    }
}

pub fn read(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Builds the model without checking the closed-manifold relations.
pub fn build_model(m: &Manifest) -> Result<ManifoldModel, CliError> {
    let domain = |e: sympsum_core::Error| CliError::Domain(e.to_string());
    let lattice = IntersectionLattice::new(m.basis.clone(), m.gram.clone()).map_err(domain)?;
    let signature = match m.signature {
        Some(s) => s,
        None => lattice.inertia().map(|i| i.signature()).unwrap_or(0),
    };
    let euler = m.euler.unwrap_or(2 + lattice.rank() as i64);
    let flags = ModelFlags {
        rational: m.flags.rational,
        ruled: m.flags.ruled,
        closed: m.flags.closed,
        minimal_known: m.minimal_known,
    };
    let mut model =
        ManifoldModel::new(m.name.clone(), lattice, m.canonical.clone(), euler, signature, flags).map_err(domain)?;
    if let Some(f) = &m.fiber {
        let f = model.class(f.clone()).map_err(domain)?;
        model = model.with_fiber(f).map_err(domain)?;
    }
    Ok(model)
}

/// Violations of the model and pair invariants, as messages.
pub fn violations(m: &Manifest, model: &ManifoldModel) -> Vec<String> {
    let mut out: Vec<String> = match validate_model(model) {
        Ok(()) => Vec::new(),
        Err(v) => v.iter().map(|x| x.to_string()).collect(),
    };
    if let Some(v) = &m.divisor {
        match model.class(v.vector.clone()).and_then(|c| SymplecticPair::new(model.clone(), c, v.genus)) {
            Ok(_) => {}
            Err(e) => out.push(e.to_string()),
        }
    }
    if let Some(c) = &m.cap {
        if let Err(e) = parse_cap(c) {
            out.push(e.to_string());
        }
    }
    out
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let manifest = read(path)?;
    let model = build_model(&manifest)?;
    let v = violations(&manifest, &model);
    if !v.is_empty() {
        return Err(CliError::Domain(format!("{}: {}", path.display(), v.join("; "))));
    }
    let pair = manifest.divisor.as_ref().map(|d| {
        SymplecticPair::new(model.clone(), model.class(d.vector.clone()).expect("validated"), d.genus)
            .expect("validated")
    });
    let cap = manifest.cap.as_deref().map(parse_cap).transpose()?;
    Ok(Loaded { manifest, model, pair, cap })
}

/// `cp2_h`, `cp2_2h`, `bundle_fiber:g[:twisted]`, `bundle_section:n`.
pub fn parse_cap(s: &str) -> Result<CapKind, CliError> {
    let bad = || CliError::Parse(format!("unknown cap `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["cp2_h"] => Ok(CapKind::Cp2Line),
        ["cp2_2h"] => Ok(CapKind::Cp2Conic),
        ["bundle_fiber", g] => Ok(CapKind::BundleFiber { genus: g.parse().map_err(|_| bad())?, twisted: false }),
        ["bundle_fiber", g, "twisted"] => {
            Ok(CapKind::BundleFiber { genus: g.parse().map_err(|_| bad())?, twisted: true })
        }
        ["bundle_section", n] => Ok(CapKind::BundleSection { n: n.parse().map_err(|_| bad())? }),
        _ => Err(bad()),
    }
}

pub fn cap_name(kind: CapKind) -> String {
    match kind {
        CapKind::Cp2Line => "cp2_h".into(),
        CapKind::Cp2Conic => "cp2_2h".into(),
        CapKind::BundleFiber { genus, twisted: false } => format!("bundle_fiber:{genus}"),
        CapKind::BundleFiber { genus, twisted: true } => format!("bundle_fiber:{genus}:twisted"),
        CapKind::BundleSection { n } => format!("bundle_section:{n}"),
    }
}

/// A manifest for a library model, with an optional divisor.
pub fn from_model(model: &ManifoldModel, divisor: Option<(&HomologyClass, u32)>) -> Manifest {
    let l = &model.lattice;
    Manifest {
        name: model.name.clone(),
        basis: l.names().to_vec(),
        gram: l.gram().to_vec(),
        canonical: model.canonical.coeffs().to_vec(),
        divisor: divisor.map(|(v, genus)| DivisorSpec { vector: v.coeffs().to_vec(), genus }),
        flags: FlagSpec { rational: model.flags.rational, ruled: model.flags.ruled, closed: model.flags.closed },
        euler: Some(model.euler),
        signature: Some(model.signature),
        fiber: model.fiber.as_ref().map(|f| f.coeffs().to_vec()),
        minimal_known: model.flags.minimal_known,
        cap: None,
    }
}

pub fn generate_cp2_blowup(k: usize) -> Manifest {
    from_model(&cp2_blowup(k), None)
}

/// The bundle with its fiber as divisor.
pub fn generate_s2_bundle(genus: u32, twisted: bool) -> Manifest {
    let m = s2_bundle(genus, twisted);
    let f = m.fiber.clone().expect("bundles carry a fiber");
    from_model(&m, Some((&f, 0)))
}
