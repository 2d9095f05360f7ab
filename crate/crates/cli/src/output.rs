//! Atomic file emission.

use std::path::Path;

/// Writes every output under `out_dir` via a temp file and rename, so a file
/// either appears complete or not at all. Emission is serialized per run;
/// one `wrote <path>` line per file goes to stdout.
pub fn write_all(out_dir: &Path, outputs: &[(String, String)]) -> Result<(), String> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| format!("{}: cannot create output directory: {e}", out_dir.display()))?;
    for (name, content) in outputs {
        let path = out_dir.join(name);
        write_atomic(&path, content.as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Temp-file-plus-rename in the target's directory, so the rename never
/// crosses filesystems.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut temp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| format!("{}: cannot create temp file: {e}", path.display()))?;
    std::io::Write::write_all(&mut temp, bytes)
        .map_err(|e| format!("{}: write failed: {e}", path.display()))?;
    temp.persist(path)
        .map_err(|e| format!("{}: rename failed: {e}", path.display()))?;
    Ok(())
}
