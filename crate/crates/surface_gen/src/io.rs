//! Mesh files. JSON with the field layout of [`SurfaceMesh`]; floats are
//! printed as the shortest decimal that parses back to the identical value
//! (never more than 17 significant digits), so a round trip is exact and
//! repeated writes are byte for byte identical. Writes land via a sibling
//! temp file and rename, so readers never observe a half written mesh.

use std::fs;
use std::path::Path;

use crate::{SurfaceError, SurfaceMesh};

pub fn write_mesh(path: &Path, mesh: &SurfaceMesh) -> Result<(), SurfaceError> {
    let text = serde_json::to_string_pretty(mesh)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "mesh".to_string());
    let tmp = path.with_file_name(format!("{name}.tmp"));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<SurfaceMesh, SurfaceError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
