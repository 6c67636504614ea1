use std::fs;

use digerm::precubical::CATALOG;
use digerm::subdivision::{Complex, SubdivisionOp};
use digerm::{gen_cube, gen_example, globe, GlobularComplex, PrecubicalSet};

/// Why an input could not be loaded. `Usage` problems exit with 2, `Domain`
/// ones with 1.
pub enum LoadError {
    Usage(String),
    Domain(String),
}

fn read(path: &str) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|e| LoadError::Usage(format!("cannot read `{path}`: {e}")))
}

fn builtin(name: &str) -> Result<Complex, LoadError> {
    let parts: Vec<&str> = name.split(':').collect();
    let dim = |s: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&n| n <= 8)
            .ok_or_else(|| LoadError::Usage(format!("`{s}` is not a dimension between 0 and 8")))
    };
    match parts.as_slice() {
        ["globe", n] => Ok(Complex::Globular(globe(dim(n)?))),
        ["cube", n] => Ok(Complex::Precubical(gen_cube(dim(n)?))),
        [name] => gen_example(name)
            .map(Complex::Precubical)
            .map_err(|e| LoadError::Usage(e.to_string())),
        _ => Err(LoadError::Usage(format!(
            "unknown builtin `{name}` (use globe:<n>, cube:<n> or one of {})",
            CATALOG.join(", ")
        ))),
    }
}

/// Loads `builtin:…` or a JSON file, dispatching on its `format` key.
/// Without one, a `cubes` key means precubical and a `cells` key globular.
pub fn load(arg: &str) -> Result<Complex, LoadError> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return builtin(name);
    }
    let text = read(arg)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| LoadError::Domain(format!("{arg}: invalid JSON: {e}")))?;
    let format = match value.get("format").and_then(|f| f.as_str()) {
        Some(f) => f.to_string(),
        None if value.get("cubes").is_some() => "precubical".into(),
        None if value.get("cells").is_some() => "globular".into(),
        None => return Err(LoadError::Domain(format!("{arg}: cannot tell the input format"))),
    };
    let domain = |e: digerm::Error| LoadError::Domain(format!("{arg}: {e}"));
    match format.as_str() {
        "precubical" => PrecubicalSet::from_json(&text).map(Complex::Precubical).map_err(domain),
        "globular" => GlobularComplex::from_json(&text).map(Complex::Globular).map_err(domain),
        other => Err(LoadError::Domain(format!("{arg}: unknown format `{other}`"))),
    }
}

pub fn load_ops(path: &str) -> Result<Vec<SubdivisionOp>, LoadError> {
    SubdivisionOp::parse_list(&read(path)?).map_err(|e| LoadError::Domain(format!("{path}: {e}")))
}
