//! Model states on disk: one GFLD1 file per member plus a JSON sidecar.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ModelKind, ModelState};
use crate::error::{Error, Result};
use crate::spectral::snapshot::{read_field, write_field};
use crate::spectral::GridSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSidecar {
    pub format: String,
    pub grid: GridSpec,
    pub kind: ModelKind,
    pub members: Vec<MemberFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberFile {
    pub name: String,
    pub file: String,
}

/// Serializes a state as `(file name, bytes)` pairs: `<stem>_<member>.gfld`
/// for each member, then `<stem>.json`.
pub fn write_state(state: &ModelState, stem: &str) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    let mut members = Vec::new();
    for (f, name) in state.fields().iter().zip(state.member_names()) {
        let file = format!("{stem}_{name}.gfld");
        let mut bytes = Vec::new();
        write_field(&mut bytes, f)?;
        out.push((file.clone(), bytes));
        members.push(MemberFile { name: name.to_string(), file });
    }
    let sidecar = StateSidecar { format: "GFLD1".into(), grid: *state.grid(), kind: state.kind().clone(), members };
    let json = serde_json::to_vec_pretty(&sidecar).map_err(|e| Error::Format(e.to_string()))?;
    out.push((format!("{stem}.json"), json));
    Ok(out)
}

/// Reads a state from its sidecar; member files are resolved next to it.
pub fn read_state(sidecar_path: &Path) -> Result<ModelState> {
    let sidecar: StateSidecar = serde_json::from_reader(BufReader::new(File::open(sidecar_path)?))
        .map_err(|e| Error::Format(format!("{}: {e}", sidecar_path.display())))?;
    if sidecar.format != "GFLD1" {
        return Err(Error::Format(format!("unsupported state format '{}'", sidecar.format)));
    }
    let dir = sidecar_path.parent().unwrap_or(Path::new("."));
    let mut fields = Vec::new();
    for m in &sidecar.members {
        let f = read_field(BufReader::new(File::open(dir.join(&m.file))?))?;
        if *f.grid() != sidecar.grid.with_dealias(f.grid().dealias())? {
            return Err(Error::Format(format!("{} disagrees with the sidecar grid", m.file)));
        }
        fields.push(f.on_grid(sidecar.grid)?);
    }
    let state = ModelState::new(sidecar.kind, fields)?;
    let expect: Vec<&str> = state.member_names().to_vec();
    let got: Vec<&str> = sidecar.members.iter().map(|m| m.name.as_str()).collect();
    if expect != got {
        return Err(Error::Format(format!("member names {got:?} do not match {expect:?}")));
    }
    Ok(state)
}
