//! JSON files for instances, partitions and traces.
//!
//! ```json
//! {"bin_volume": 6, "sizes": [5, 4, 3, 2, 1]}
//! {"bins": [[0, 4], [1, 3], [2]]}
//! ```
//!
//! Item indices are 0-based positions in `sizes`. Unknown fields are
//! rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, ModelError, Partition, Size};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub bin_volume: Size,
    pub sizes: Vec<Size>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub bins: Vec<Vec<usize>>,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: std::io::Error },
    #[error("line {line}, column {column}{}: {message}", at(field))]
    Syntax {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("field `{field}`: {source}")]
    Invalid { field: String, source: ModelError },
}

fn at(field: &str) -> String {
    if field.is_empty() || field == "." {
        String::new()
    } else {
        format!(" (field `{field}`)")
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| IoError::Syntax {
        line: e.inner().line(),
        column: e.inner().column(),
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    Ok(value)
}

fn field_of(err: &ModelError) -> String {
    match err {
        ModelError::ZeroSize { index } | ModelError::ItemTooLarge { index, .. } => format!("sizes[{index}]"),
        ModelError::NoItems => "sizes".into(),
        ModelError::ZeroVolume => "bin_volume".into(),
        ModelError::EmptyBin { bin } => format!("bins[{bin}]"),
        _ => "bins".into(),
    }
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            bin_volume: inst.bin_volume(),
            sizes: inst.sizes().to_vec(),
        }
    }

    pub fn into_instance(self) -> Result<Instance, IoError> {
        Instance::new(self.sizes, self.bin_volume).map_err(|e| IoError::Invalid {
            field: field_of(&e),
            source: e,
        })
    }
}

impl PartitionFile {
    pub fn from_partition(p: &Partition) -> Self {
        Self { bins: p.bins().to_vec() }
    }

    pub fn into_partition(self, inst: &Instance) -> Result<Partition, IoError> {
        Partition::for_instance(self.bins, inst).map_err(|e| IoError::Invalid {
            field: field_of(&e),
            source: e,
        })
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    parse::<InstanceFile>(text)?.into_instance()
}

pub fn parse_partition(text: &str, inst: &Instance) -> Result<Partition, IoError> {
    parse::<PartitionFile>(text)?.into_partition(inst)
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&read(path)?)
}

pub fn read_partition(path: &Path, inst: &Instance) -> Result<Partition, IoError> {
    parse_partition(&read(path)?, inst)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn instance_json(inst: &Instance) -> String {
    to_json(&InstanceFile::from_instance(inst))
}

pub fn partition_json(p: &Partition) -> String {
    to_json(&PartitionFile::from_partition(p))
}

pub fn write(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let inst = Instance::new(vec![5, 4, 3, 2, 1], 6).unwrap();
        assert_eq!(parse_instance(&instance_json(&inst)).unwrap(), inst);
        let p = Partition::new(vec![vec![0, 4], vec![1, 3], vec![2]], 5).unwrap();
        assert_eq!(parse_partition(&partition_json(&p), &inst).unwrap(), p);
    }

    #[test]
    fn diagnostics() {
        let err = parse_instance("{\"bin_volume\": 6,\n \"sizes\": [1, -2]}").unwrap_err();
        match &err {
            IoError::Syntax { line, field, .. } => assert_eq!((*line, field.as_str()), (2, "sizes[1]")),
            other => panic!("{other:?}"),
        }
        let err = parse_instance(r#"{"bin_volume": 6, "sizes": [1, 0]}"#).unwrap_err();
        assert!(err.to_string().contains("sizes[1]"), "{err}");
        let err = parse_instance(r#"{"bin_volume": 6, "sizes": [7]}"#).unwrap_err();
        assert!(err.to_string().contains("sizes[0]"), "{err}");
        let err = parse_instance(r#"{"bin_volume": 6, "size": [1]}"#).unwrap_err();
        assert!(matches!(err, IoError::Syntax { .. }));

        let inst = Instance::new(vec![1, 2, 3], 4).unwrap();
        let err = parse_partition(r#"{"bins": [[0, 1], [1, 2]]}"#, &inst).unwrap_err();
        assert!(matches!(err, IoError::Invalid { source: ModelError::DuplicateItem { item: 1 }, .. }));
        let err = parse_partition(r#"{"bins": [[0, 1]]}"#, &inst).unwrap_err();
        assert!(matches!(err, IoError::Invalid { source: ModelError::MissingItem { item: 2 }, .. }));
    }
}
