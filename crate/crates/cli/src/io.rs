//! File reading, argument parsing helpers and output writers.

use std::fs;
use std::path::{Path, PathBuf};

use local_nash::game::{CostSpec, GameDefinition, Polynomial};
use local_nash::olg::OpenLoopGame;
use local_nash::Cost;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_game(path: &Path) -> CliResult<GameDefinition> {
    Ok(local_nash::load_game(&read_text(path)?)?)
}

pub fn load_olg(path: &Path) -> CliResult<OpenLoopGame> {
    Ok(local_nash::olg::load_olg(&read_text(path)?)?)
}

/// Comma-separated numbers, e.g. `2,2` or `-1.5, 0`.
pub fn parse_vector(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| CliError::Input(format!("`{s}` is not a number (in `{text}`)")))
        })
        .collect()
}

/// Either `lo,hi` for every coordinate or `lo1,hi1,...,lom,him`.
pub fn parse_box(text: &str, m: usize) -> CliResult<Vec<(f64, f64)>> {
    let v = parse_vector(text)?;
    let pairs: Vec<(f64, f64)> = v.chunks(2).filter(|c| c.len() == 2).map(|c| (c[0], c[1])).collect();
    match (v.len(), pairs.len()) {
        (2, _) => Ok(vec![pairs[0]; m]),
        (n, p) if n == 2 * m && p == m => Ok(pairs),
        (n, _) => Err(CliError::Input(format!(
            "--box needs 2 or {} numbers, got {n}",
            2 * m
        ))),
    }
}

pub fn parse_range(text: &str) -> CliResult<(f64, f64)> {
    match parse_vector(text)?.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        other => Err(CliError::Input(format!(
            "--s-range needs two numbers, got {}",
            other.len()
        ))),
    }
}

/// Points from a CSV file with a header row and one point per record.
pub fn read_points(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let mut points = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let point = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Input(format!("{} row {}: {e}", path.display(), k + 1)))?;
        points.push(point);
    }
    Ok(points)
}

/// Perturbation costs for continuation.
///
/// `zero` gives `zeta_i = 0`; `own-linear` gives `zeta_i` equal to the sum of
/// player `i`'s own coordinates. Anything else is a JSON array of per-player
/// cost entries, inline or in a file.
pub fn parse_zeta(spec: &str, game: &GameDefinition) -> CliResult<Vec<Cost>> {
    let m = game.dim();
    match spec {
        "zero" => Ok(vec![Cost::Polynomial(Polynomial::zero(m)); game.n_players()]),
        "own-linear" => (0..game.n_players())
            .map(|i| {
                game.block(i)
                    .try_fold(Polynomial::zero(m), |acc, k| acc.plus(&Polynomial::coordinate(m, k)))
                    .map(Cost::Polynomial)
                    .map_err(CliError::from)
            })
            .collect(),
        _ => {
            let text = if spec.trim_start().starts_with('[') {
                spec.to_string()
            } else {
                read_text(Path::new(spec))?
            };
            let specs: Vec<CostSpec> = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("--zeta: {e}")))?;
            if specs.len() != game.n_players() {
                return Err(CliError::Input(format!(
                    "--zeta has {} entries for {} players",
                    specs.len(),
                    game.n_players()
                )));
            }
            specs
                .iter()
                .map(|s| s.compile(m).map_err(CliError::from))
                .collect()
        }
    }
}

pub fn create_csv(path: &Path) -> CliResult<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_csv<I>(path: &Path, header: Vec<String>, records: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let wrap = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = create_csv(path)?;
    w.write_record(header).map_err(wrap)?;
    for r in records {
        w.write_record(r).map_err(wrap)?;
    }
    w.flush().map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: PathBuf,
    pub options: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
    pub tolerances: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, config_path: &Path) -> Self {
        Self {
            command: command.to_string(),
            config_path: config_path.to_path_buf(),
            options: serde_json::Value::Null,
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION"),
            tolerances: serde_json::Value::Null,
        }
    }

    pub fn options(mut self, v: impl Serialize) -> Self {
        self.options = serde_json::to_value(v).expect("serializable options");
        self
    }

    pub fn tolerances(mut self, v: impl Serialize) -> Self {
        self.tolerances = serde_json::to_value(v).expect("serializable tolerances");
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Written next to `out` as `<out>.manifest.json`.
    pub fn write_beside(&self, out: &Path) -> CliResult<PathBuf> {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        write_json(&path, self)?;
        Ok(path)
    }
}

/// Plain decimal for moderate magnitudes, scientific otherwise.
pub fn fmt_value(x: f64) -> String {
    if x == 0.0 || (1e-4..1e7).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn fmt_point(u: &[f64]) -> String {
    u.iter().map(|x| fmt_value(*x)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_and_boxes() {
        assert_eq!(parse_vector("2, -1.5").unwrap(), vec![2.0, -1.5]);
        assert!(parse_vector("2,x").is_err());
        assert_eq!(parse_box("-5,5", 2).unwrap(), vec![(-5.0, 5.0); 2]);
        assert_eq!(parse_box("0,1,2,3", 2).unwrap(), vec![(0.0, 1.0), (2.0, 3.0)]);
        assert!(parse_box("0,1,2", 2).is_err());
        assert_eq!(parse_range("-0.5,1").unwrap(), (-0.5, 1.0));
    }

    #[test]
    fn zeta_forms() {
        let g = local_nash::Builtin::IncentiveGame { a: 1.0, tau: 20.0 }.game();
        let own = parse_zeta("own-linear", &g).unwrap();
        assert_eq!(own[0].value(&[3.0, 5.0]), 3.0);
        assert_eq!(own[1].value(&[3.0, 5.0]), 5.0);
        let zero = parse_zeta("zero", &g).unwrap();
        assert_eq!(zero[1].value(&[3.0, 5.0]), 0.0);
        let inline = parse_zeta(r#"[{"polynomial": [[2.0, [1, 0]]]}, {"polynomial": []}]"#, &g).unwrap();
        assert_eq!(inline[0].value(&[3.0, 5.0]), 6.0);
        assert!(parse_zeta("[]", &g).is_err());
    }

    #[test]
    fn manifest_path() {
        let dir = std::env::temp_dir().join(format!("lnash-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = RunManifest::new("flow", Path::new("g.json"))
            .seed(7)
            .write_beside(&dir.join("run.csv"))
            .unwrap();
        assert!(p.ends_with("run.csv.manifest.json"));
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"seed\": 7"));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn value_formatting() {
        assert_eq!(fmt_point(&[2.0, -0.5]), "2,-0.5");
        assert_eq!(fmt_value(2.5e-31), "2.5e-31");
    }
}
