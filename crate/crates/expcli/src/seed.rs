/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "SCHMIDT_SCOPE_SEED";

/// Flag, then environment, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer")),
        None => Ok(0),
    }
}
