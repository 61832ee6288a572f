//! On-disk cache of enumerated Grassmannians, one JSON file per (n, p, k).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmannian::{Geometry, Grassmannian};
use crate::linalg::{Subspace, SubspaceJson};
use crate::space::{SpaceHeader, SymplecticSpace};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "SYMGRASS_CACHE";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub space: SpaceHeader,
    pub k: usize,
    pub elements: Vec<SubspaceJson>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: usize,
    pub writes: usize,
}

/// An explicit directory wins over the environment variable; neither means no cache.
pub fn cache_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

pub fn cache_path(dir: &Path, space: &SymplecticSpace, k: usize) -> PathBuf {
    dir.join(format!("grassmannian_n{}_p{}_k{}.json", space.n(), space.p(), k))
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

pub fn encode(g: &Grassmannian) -> Result<Vec<u8>> {
    let file = CacheFile {
        space: g.space().header(),
        k: g.k(),
        elements: g.elements().iter().map(Subspace::to_json).collect(),
    };
    let mut bytes = serde_json::to_vec(&file)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn decode(space: &SymplecticSpace, bytes: &[u8]) -> Result<Grassmannian> {
    let file: CacheFile = serde_json::from_slice(bytes)?;
    if file.space != space.header() {
        return Err(Error::SpaceMismatch("cache header does not match the space".into()));
    }
    let elements = file
        .elements
        .iter()
        .map(Subspace::from_json)
        .collect::<Result<Vec<_>>>()?;
    Grassmannian::from_elements(space, file.k, elements)
}

/// The cached level, or `None` if the file is absent. A corrupt file is an error.
pub fn load_level(dir: &Path, space: &SymplecticSpace, k: usize) -> Result<Option<Grassmannian>> {
    let path = cache_path(dir, space, k);
    match fs::read(&path) {
        Ok(bytes) => decode(space, &bytes)
            .map(Some)
            .map_err(|e| Error::Malformed(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn store_level(dir: &Path, g: &Grassmannian) -> Result<PathBuf> {
    let path = cache_path(dir, g.space(), g.k());
    write_atomic(&path, &encode(g)?)?;
    Ok(path)
}

/// Every level of the space, from the cache where possible; missing levels are
/// enumerated and written back.
pub fn load_geometry(space: &SymplecticSpace, dir: Option<&Path>) -> Result<(Geometry, CacheStats)> {
    let mut stats = CacheStats::default();
    let Some(dir) = dir else {
        return Ok((Geometry::new(space), stats));
    };
    let mut levels = Vec::with_capacity(space.n());
    for k in 0..space.n() {
        match load_level(dir, space, k)? {
            Some(g) => levels.push(g),
            None => break,
        }
    }
    stats.hits = levels.len();
    if levels.len() == space.n() {
        return Ok((Geometry::from_levels(space, levels), stats));
    }
    let geo = Geometry::new(space);
    for g in &geo.levels()[stats.hits..] {
        store_level(dir, g)?;
        stats.writes += 1;
    }
    Ok((geo, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_reuse() {
        let dir = std::env::temp_dir().join(format!("symgrass-cache-test-{}", std::process::id()));
        let sp = SymplecticSpace::standard(2, 2).unwrap();
        let (g1, s1) = load_geometry(&sp, Some(&dir)).unwrap();
        assert_eq!(s1, CacheStats { hits: 0, writes: 2 });
        let bytes = fs::read(cache_path(&dir, &sp, 1)).unwrap();
        let (g2, s2) = load_geometry(&sp, Some(&dir)).unwrap();
        assert_eq!(s2, CacheStats { hits: 2, writes: 0 });
        assert_eq!(g1.level(1).elements(), g2.level(1).elements());
        assert_eq!(fs::read(cache_path(&dir, &sp, 1)).unwrap(), bytes);
        fs::write(cache_path(&dir, &sp, 0), b"{\"space\":").unwrap();
        assert!(load_geometry(&sp, Some(&dir)).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }
}
