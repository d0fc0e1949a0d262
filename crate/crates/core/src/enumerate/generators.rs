use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::liegroup::GMatrix;
use crate::scalars::{check_discriminant, QuadMatrix, QuadRational};

/// Role of a generator in an amalgam `Γ1 *_Δ Γ2` or an HNN extension of `Γ1` over `Δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    Gamma1,
    Gamma2,
    Delta,
    Stable,
}

impl Tag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::Gamma1 => "Gamma1",
            Tag::Gamma2 => "Gamma2",
            Tag::Delta => "Delta",
            Tag::Stable => "stable",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gamma1" | "γ1" => Ok(Tag::Gamma1),
            "gamma2" | "γ2" => Ok(Tag::Gamma2),
            "delta" | "δ" => Ok(Tag::Delta),
            "stable" | "s" => Ok(Tag::Stable),
            _ => Err(Error::GeneratorFile(format!("unknown tag {s:?}"))),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the tags of a system are to be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coloring {
    Untagged,
    Amalgam,
    Hnn,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub label: String,
    pub tag: Option<Tag>,
    pub matrix: GMatrix,
    /// Index of the exact inverse within the system (possibly itself).
    pub inverse: usize,
    /// First member of its inverse pair in system order.
    pub primary: bool,
}

/// Symmetric labeled generating set, closed under exact inverses.
#[derive(Clone, Debug)]
pub struct GeneratorSystem {
    n: usize,
    d: u32,
    gens: Vec<Generator>,
    coloring: Coloring,
}

impl GeneratorSystem {
    /// Certify the matrices, pair them with their inverses (adding `label^-1` where absent) and
    /// check the coloring.
    pub fn new(n: usize, d: u32, entries: Vec<(String, Option<Tag>, QuadMatrix)>) -> Result<Self> {
        check_discriminant(d as u64)?;
        if entries.is_empty() {
            return Err(Error::GeneratorFile("no generators".into()));
        }
        let mut gens: Vec<Generator> = Vec::with_capacity(2 * entries.len());
        for (label, tag, m) in entries {
            if m.d() != d {
                return Err(Error::FieldMismatch(d, m.d()));
            }
            if gens.iter().any(|g| g.label == label) {
                return Err(Error::GeneratorFile(format!("duplicate label {label:?}")));
            }
            let g = GMatrix::certify(n, m, &label)?;
            if let Some(prev) = gens.iter().find(|h| h.matrix == g) {
                return Err(Error::GeneratorFile(format!("{label:?} repeats the matrix of {:?}", prev.label)));
            }
            if g.is_identity() {
                return Err(Error::GeneratorFile(format!("generator {label:?} is the identity")));
            }
            gens.push(Generator { label, tag, matrix: g, inverse: usize::MAX, primary: false });
        }
        let listed = gens.len();
        for i in 0..listed {
            if gens[i].inverse != usize::MAX {
                continue;
            }
            let inv = gens[i].matrix.inverse();
            match (i..gens.len()).find(|&j| gens[j].matrix == inv) {
                Some(j) => {
                    if gens[j].tag != gens[i].tag {
                        return Err(Error::GeneratorFile(format!(
                            "{:?} and its inverse {:?} carry different tags",
                            gens[i].label, gens[j].label
                        )));
                    }
                    gens[i].inverse = j;
                    gens[j].inverse = i;
                }
                None => {
                    let label = format!("{}^-1", gens[i].label);
                    if gens.iter().any(|g| g.label == label) {
                        return Err(Error::GeneratorFile(format!("label {label:?} is taken by a non-inverse")));
                    }
                    let j = gens.len();
                    gens[i].inverse = j;
                    let tag = gens[i].tag;
                    gens.push(Generator { label, tag, matrix: inv, inverse: i, primary: false });
                }
            }
            gens[i].primary = true;
        }
        let coloring = coloring_of(&gens)?;
        Ok(GeneratorSystem { n, d, gens, coloring })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn coloring(&self) -> Coloring {
        self.coloring
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.label == label)
    }

    /// Product of the generators along a word of indices.
    pub fn evaluate(&self, word: &[usize]) -> GMatrix {
        word.iter().fold(GMatrix::identity(self.n, self.d), |acc, &k| acc.mul(&self.gens[k].matrix))
    }

    /// Replace matrices of the primary generators, recomputing inverse partners exactly.
    pub(crate) fn with_primaries(&self, f: impl Fn(&Generator) -> Result<GMatrix>) -> Result<Self> {
        let mut gens = self.gens.clone();
        for i in 0..gens.len() {
            if gens[i].primary {
                let m = f(&self.gens[i])?;
                let j = gens[i].inverse;
                if j != i {
                    gens[j].matrix = m.inverse();
                } else if !m.mul(&m).is_identity() {
                    return Err(Error::Bending(format!("image of involution {:?} is not an involution", gens[i].label)));
                }
                gens[i].matrix = m;
            }
        }
        Ok(GeneratorSystem { n: self.n, d: self.d, gens, coloring: self.coloring })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| Error::GeneratorFile("missing n".into()))? as usize;
        let d = v.get("d").and_then(Value::as_u64).unwrap_or(1);
        check_discriminant(d)?;
        let d = d as u32;
        let dim = n + 2;
        let list = v
            .get("generators")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::GeneratorFile("missing generators".into()))?;
        let mut entries = Vec::with_capacity(list.len());
        for (k, item) in list.iter().enumerate() {
            let label = match item.get("label") {
                Some(Value::String(s)) => s.clone(),
                None => format!("g{k}"),
                Some(other) => return Err(Error::GeneratorFile(format!("bad label {other}"))),
            };
            let tag = match item.get("tag") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) if s.is_empty() => None,
                Some(Value::String(s)) => Some(Tag::parse(s)?),
                Some(other) => return Err(Error::GeneratorFile(format!("bad tag {other}"))),
            };
            let rows = item
                .get("matrix")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::GeneratorFile(format!("{label}: missing matrix")))?;
            if rows.len() != dim * dim {
                return Err(Error::GeneratorFile(format!(
                    "{label}: expected {} entries, found {}",
                    dim * dim,
                    rows.len()
                )));
            }
            let mut scalars = Vec::with_capacity(dim * dim);
            for (e, triple) in rows.iter().enumerate() {
                let t = triple
                    .as_array()
                    .filter(|t| t.len() == 3)
                    .ok_or_else(|| Error::GeneratorFile(format!("{label}: entry {e} is not a triple")))?;
                let a = parse_int(&t[0], &label)?;
                let b = parse_int(&t[1], &label)?;
                let den = parse_int(&t[2], &label)?;
                let x = QuadRational::normalize(a, b, den, d)
                    .map_err(|err| Error::GeneratorFile(format!("{label}: entry ({}, {}): {err}", e / dim + 1, e % dim + 1)))?;
                scalars.push(x);
            }
            entries.push((label, tag, QuadMatrix::from_entries(dim, d, &scalars)?));
        }
        GeneratorSystem::new(n, d, entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::GeneratorFile(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> Value {
        let dim = self.n + 2;
        let gens: Vec<Value> = self
            .gens
            .iter()
            .map(|g| {
                let m = g.matrix.exact();
                let entries: Vec<Value> = (0..dim * dim)
                    .map(|k| {
                        let x = m.entry(k / dim, k % dim);
                        json!([int_value(x.a()), int_value(x.b()), int_value(x.den())])
                    })
                    .collect();
                json!({
                    "label": g.label,
                    "tag": g.tag.map(|t| t.as_str()),
                    "matrix": entries,
                })
            })
            .collect();
        json!({ "n": self.n, "d": self.d, "generators": gens })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON text.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json_string().as_bytes()))
    }
}

fn coloring_of(gens: &[Generator]) -> Result<Coloring> {
    let tagged = gens.iter().filter(|g| g.tag.is_some()).count();
    if tagged == 0 {
        return Ok(Coloring::Untagged);
    }
    if tagged != gens.len() {
        return Err(Error::GeneratorFile("either every generator carries a tag or none does".into()));
    }
    let has = |t: Tag| gens.iter().any(|g| g.tag == Some(t));
    match (has(Tag::Gamma2), has(Tag::Stable)) {
        (true, true) => Err(Error::GeneratorFile("Gamma2 and stable tags cannot be mixed".into())),
        (false, true) => Ok(Coloring::Hnn),
        _ => Ok(Coloring::Amalgam),
    }
}

fn parse_int(v: &Value, label: &str) -> Result<BigInt> {
    match v {
        Value::Number(x) => x
            .as_i64()
            .map(BigInt::from)
            .or_else(|| x.as_u64().map(BigInt::from))
            .ok_or_else(|| Error::GeneratorFile(format!("{label}: non-integer {x}"))),
        Value::String(s) => s.trim().parse().map_err(|_| Error::GeneratorFile(format!("{label}: bad integer {s:?}"))),
        other => Err(Error::GeneratorFile(format!("{label}: bad integer {other}"))),
    }
}

/// JSON number when it fits in 53 bits, decimal string otherwise.
fn int_value(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) if v.unsigned_abs() < (1u64 << 53) => json!(v),
        _ => Value::String(x.to_string()),
    }
}
