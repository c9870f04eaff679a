//! JSON documents for matrices and measure spaces.
//!
//! Complex scalars are two-element arrays `[re, im]`. A matrix document is
//! `{"dim_rows": r, "dim_cols": c, "entries": [[[re, im], ...], ...]}`.

use serde::{Deserialize, Serialize, Serializer};

use crate::condexp::{BlockPartition, FiniteMeasureSpace, MeasurableFunction, Setup};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

pub fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().copied().map(pair).collect()
}

pub fn serialize_vector<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    pairs(v).serialize(s)
}

pub fn serialize_opt_vector<S: Serializer>(
    v: &Option<Vec<C64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.as_deref().map(pairs).serialize(s)
}

pub fn serialize_matrix<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    MatrixDoc::from_matrix(m).serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub dim_rows: usize,
    pub dim_cols: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            dim_rows: m.rows(),
            dim_cols: m.cols(),
            entries: m.to_rows().iter().map(|r| pairs(r)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.dim_rows == 0 || self.dim_cols == 0 {
            return Err(Error::invalid("dim_rows/dim_cols", "dimensions must be at least 1"));
        }
        if self.entries.len() != self.dim_rows {
            return Err(Error::invalid(
                "entries",
                format!("expected {} rows, found {}", self.dim_rows, self.entries.len()),
            ));
        }
        let mut data = Vec::with_capacity(self.dim_rows * self.dim_cols);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.dim_cols {
                return Err(Error::invalid(
                    format!("entries[{i}]"),
                    format!("expected {} columns, found {}", self.dim_cols, row.len()),
                ));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(Error::invalid(format!("entries[{i}][{j}]"), "entry is not finite"));
                }
                data.push(C64::new(re, im));
            }
        }
        Ok(ComplexMatrix::new(self.dim_rows, self.dim_cols, data)?)
    }
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::invalid("document", e.to_string()))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    parse_json::<MatrixDoc>(text)?.to_matrix()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&MatrixDoc::from_matrix(m)).expect("matrix serialises")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub mass: f64,
    pub label: String,
}

/// `{"atoms": [{mass, label}], "partition": [[i, ...]], "w": [[re, im]], "u": [[re, im]]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub atoms: Vec<AtomDoc>,
    pub partition: Vec<Vec<usize>>,
    pub w: Vec<[f64; 2]>,
    pub u: Vec<[f64; 2]>,
}

impl SpaceDoc {
    pub fn from_setup(s: &Setup) -> Self {
        let Setup { space, partition, w, u } = s;
        Self {
            atoms: space
                .masses()
                .iter()
                .zip(space.labels())
                .map(|(&mass, label)| AtomDoc {
                    mass,
                    label: label.clone(),
                })
                .collect(),
            partition: partition.blocks().to_vec(),
            w: pairs(w.values()),
            u: pairs(u.values()),
        }
    }

    pub fn validate(&self) -> Result<Setup> {
        let masses: Vec<f64> = self.atoms.iter().map(|a| a.mass).collect();
        let labels: Vec<String> = self.atoms.iter().map(|a| a.label.clone()).collect();
        let space = FiniteMeasureSpace::with_labels(masses, labels)?;
        let partition = BlockPartition::new(self.partition.clone(), space.len())?;
        let func = |field: &str, v: &[[f64; 2]]| -> Result<MeasurableFunction> {
            if v.len() != space.len() {
                return Err(Error::invalid(
                    field,
                    format!("expected {} values, found {}", space.len(), v.len()),
                ));
            }
            for (i, [re, im]) in v.iter().enumerate() {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(Error::invalid(format!("{field}[{i}]"), "value is not finite"));
                }
            }
            MeasurableFunction::new(&space, v.iter().map(|&[re, im]| C64::new(re, im)).collect())
        };
        let w = func("w", &self.w)?;
        let u = func("u", &self.u)?;
        Ok(Setup { space, partition, w, u })
    }
}

pub fn parse_space(text: &str) -> Result<Setup> {
    parse_json::<SpaceDoc>(text)?.validate()
}
