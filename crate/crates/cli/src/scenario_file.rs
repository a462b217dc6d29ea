//! Plain-text scenario files: a small sectioned key-value format that
//! round-trips exactly (`parse(print(spec)) == spec`), with errors that
//! cite line numbers.
//!
//! ```text
//! [grid]
//! n = 1024
//! extent = 64
//!
//! [source]
//! kind = gaussian
//! q_i = 8
//! delta = 0
//!
//! [slits]
//! d = 4
//! q_f = 1
//!
//! [elements]
//! detector_filter q_d=2.4 center=4
//!
//! [planes]
//! tau = 0 5
//!
//! [output]
//! directory = out
//! format = csv
//! metrics = marginals visibility interference
//! ```
//!
//! Sections may appear at most once; unknown sections and keys are
//! rejected. `[grid]`, `[planes]`, `[output]`, and `[meta]` are optional
//! (`n = 1024`, `extent = 64`, planes `0 5`, all metrics). Sources:
//! `gaussian` (keys `q_i`, optional `delta`), `cat` (no extra keys),
//! `lens_output` (keys `K`, `p0`). Element lines are
//! `kind key=value ...` with kinds `free_space tau=..`, `lens K=..`,
//! `tilt p0=..`, `detector_filter q_d=.. center=..`.

use std::collections::HashMap;
use std::fmt;

use wigsim::scenarios::{
    ElementSpec, GridSpec, MetricSelection, ScenarioSpec, SlitGeometry, SourceSpec,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub directory: Option<String>,
    pub format: OutputFormat,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            directory: None,
            format: OutputFormat::Csv,
        }
    }
}

/// A parsed scenario file: the library-level spec plus output routing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub spec: ScenarioSpec,
    pub output: OutputSpec,
}

#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn parse_number(line: usize, key: &str, raw: &str) -> Result<f64, ParseError> {
    let value: f64 = raw
        .parse()
        .map_err(|_| err(line, format!("value of `{key}` is not a number: `{raw}`")))?;
    if !value.is_finite() {
        return Err(err(line, format!("value of `{key}` must be finite")));
    }
    Ok(value)
}

fn require_positive(line: usize, key: &str, value: f64) -> Result<f64, ParseError> {
    if value <= 0.0 {
        return Err(err(line, format!("`{key}` must be positive, got {value}")));
    }
    Ok(value)
}

/// One `key = value` occurrence with its source line.
type KeyMap = HashMap<String, (usize, String)>;

#[derive(Default)]
struct Sections {
    grid: Option<(usize, KeyMap)>,
    source: Option<(usize, KeyMap)>,
    slits: Option<(usize, KeyMap)>,
    output: Option<(usize, KeyMap)>,
    meta: Option<(usize, KeyMap)>,
    planes: Option<(usize, KeyMap)>,
    elements: Vec<(usize, String)>,
}

fn split_sections(text: &str) -> Result<Sections, ParseError> {
    let mut sections = Sections::default();
    let mut current: Option<&str> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let slot = match name {
                "grid" => &mut sections.grid,
                "source" => &mut sections.source,
                "slits" => &mut sections.slits,
                "output" => &mut sections.output,
                "meta" => &mut sections.meta,
                "planes" => &mut sections.planes,
                "elements" => {
                    if current == Some("elements") || !sections.elements.is_empty() {
                        return Err(err(line_no, "duplicate section [elements]"));
                    }
                    current = Some("elements");
                    continue;
                }
                other => return Err(err(line_no, format!("unknown section [{other}]"))),
            };
            if slot.is_some() {
                return Err(err(line_no, format!("duplicate section [{name}]")));
            }
            *slot = Some((line_no, KeyMap::new()));
            current = Some(match name {
                "grid" => "grid",
                "source" => "source",
                "slits" => "slits",
                "output" => "output",
                "meta" => "meta",
                "planes" => "planes",
                _ => unreachable!(),
            });
            continue;
        }
        let Some(section) = current else {
            return Err(err(line_no, "content before the first section header"));
        };
        if section == "elements" {
            sections.elements.push((line_no, line.to_string()));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(line_no, "expected `key = value`"));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let map = match section {
            "grid" => &mut sections.grid,
            "source" => &mut sections.source,
            "slits" => &mut sections.slits,
            "output" => &mut sections.output,
            "meta" => &mut sections.meta,
            "planes" => &mut sections.planes,
            _ => unreachable!(),
        };
        let (_, map) = map.as_mut().expect("section opened above");
        if map.insert(key.clone(), (line_no, value)).is_some() {
            return Err(err(line_no, format!("duplicate key `{key}`")));
        }
    }
    Ok(sections)
}

fn reject_unknown(map: &KeyMap, section: &str, known: &[&str]) -> Result<(), ParseError> {
    for (key, (line, _)) in map {
        if !known.contains(&key.as_str()) {
            return Err(err(*line, format!("unknown key `{key}` in [{section}]")));
        }
    }
    Ok(())
}

fn parse_element(line_no: usize, line: &str) -> Result<ElementSpec, ParseError> {
    let mut parts = line.split_whitespace();
    let kind = parts.next().expect("non-empty line");
    let mut args: HashMap<&str, f64> = HashMap::new();
    for part in parts {
        let Some((key, value)) = part.split_once('=') else {
            return Err(err(
                line_no,
                format!("element parameter `{part}` is not `key=value`"),
            ));
        };
        if args
            .insert(key, parse_number(line_no, key, value)?)
            .is_some()
        {
            return Err(err(line_no, format!("duplicate element parameter `{key}`")));
        }
    }
    let mut take = |key: &str| -> Result<f64, ParseError> {
        args.remove(key)
            .ok_or_else(|| err(line_no, format!("element `{kind}` needs `{key}=`")))
    };
    let element = match kind {
        "free_space" => ElementSpec::FreeSpace { tau: take("tau")? },
        "lens" => ElementSpec::Lens {
            k_param: require_positive(line_no, "K", take("K")?)?,
        },
        "tilt" => ElementSpec::Tilt { p0: take("p0")? },
        "detector_filter" => ElementSpec::DetectorFilter {
            q_d: require_positive(line_no, "q_d", take("q_d")?)?,
            center: take("center")?,
        },
        other => return Err(err(line_no, format!("unknown element kind `{other}`"))),
    };
    if let Some(extra) = args.keys().next() {
        return Err(err(
            line_no,
            format!("element `{kind}` does not take `{extra}`"),
        ));
    }
    Ok(element)
}

/// Parse a scenario file, applying defaults and validating constraints.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ParseError> {
    let sections = split_sections(text)?;

    let grid = match &sections.grid {
        None => GridSpec::default(),
        Some((header, map)) => {
            reject_unknown(map, "grid", &["n", "extent"])?;
            let n = match map.get("n") {
                Some((line, raw)) => {
                    let n: usize = raw
                        .parse()
                        .map_err(|_| err(*line, format!("`n` is not an integer: `{raw}`")))?;
                    if n < 4 || n % 2 != 0 {
                        return Err(err(*line, format!("`n` must be even and >= 4, got {n}")));
                    }
                    n
                }
                None => return Err(err(*header, "[grid] needs `n`")),
            };
            let extent = match map.get("extent") {
                Some((line, raw)) => {
                    require_positive(*line, "extent", parse_number(*line, "extent", raw)?)?
                }
                None => return Err(err(*header, "[grid] needs `extent`")),
            };
            GridSpec { n, extent }
        }
    };

    let Some((source_header, source_map)) = &sections.source else {
        return Err(err(0, "missing required section [source]"));
    };
    let kind = source_map
        .get("kind")
        .ok_or_else(|| err(*source_header, "[source] needs `kind`"))?;
    let source = match kind.1.as_str() {
        "gaussian" => {
            reject_unknown(source_map, "source", &["kind", "q_i", "delta"])?;
            let q_i = match source_map.get("q_i") {
                Some((line, raw)) => {
                    require_positive(*line, "q_i", parse_number(*line, "q_i", raw)?)?
                }
                None => return Err(err(*source_header, "gaussian source needs `q_i`")),
            };
            let delta = match source_map.get("delta") {
                Some((line, raw)) => parse_number(*line, "delta", raw)?,
                None => 0.0,
            };
            SourceSpec::Gaussian { q_i, delta }
        }
        "cat" => {
            reject_unknown(source_map, "source", &["kind"])?;
            SourceSpec::Cat
        }
        "lens_output" => {
            reject_unknown(source_map, "source", &["kind", "K", "p0"])?;
            let k_param = match source_map.get("K") {
                Some((line, raw)) => require_positive(*line, "K", parse_number(*line, "K", raw)?)?,
                None => return Err(err(*source_header, "lens_output source needs `K`")),
            };
            let p0 = match source_map.get("p0") {
                Some((line, raw)) => parse_number(*line, "p0", raw)?,
                None => return Err(err(*source_header, "lens_output source needs `p0`")),
            };
            SourceSpec::LensOutput { k_param, p0 }
        }
        other => {
            return Err(err(
                kind.0,
                format!("unknown source kind `{other}` (gaussian | cat | lens_output)"),
            ))
        }
    };

    let Some((slits_header, slits_map)) = &sections.slits else {
        return Err(err(0, "missing required section [slits]"));
    };
    reject_unknown(slits_map, "slits", &["d", "q_f"])?;
    let d = match slits_map.get("d") {
        Some((line, raw)) => require_positive(*line, "d", parse_number(*line, "d", raw)?)?,
        None => return Err(err(*slits_header, "[slits] needs `d`")),
    };
    let q_f = match slits_map.get("q_f") {
        Some((line, raw)) => require_positive(*line, "q_f", parse_number(*line, "q_f", raw)?)?,
        None => return Err(err(*slits_header, "[slits] needs `q_f`")),
    };

    let mut elements = Vec::new();
    for (line_no, line) in &sections.elements {
        elements.push(parse_element(*line_no, line)?);
    }

    let planes = match &sections.planes {
        None => vec![0.0, 5.0],
        Some((header, map)) => {
            reject_unknown(map, "planes", &["tau"])?;
            let Some((line, raw)) = map.get("tau") else {
                return Err(err(*header, "[planes] needs `tau`"));
            };
            let mut planes = Vec::new();
            for token in raw.split_whitespace() {
                planes.push(parse_number(*line, "tau", token)?);
            }
            if planes.is_empty() {
                return Err(err(*line, "`tau` needs at least one value"));
            }
            if planes.windows(2).any(|w| w[0] > w[1]) {
                return Err(err(*line, "planes must be sorted in ascending order"));
            }
            planes
        }
    };

    let mut metrics = MetricSelection::default();
    let mut output = OutputSpec::default();
    if let Some((_, map)) = &sections.output {
        reject_unknown(map, "output", &["directory", "format", "metrics"])?;
        if let Some((_, dir)) = map.get("directory") {
            output.directory = Some(dir.clone());
        }
        if let Some((line, format)) = map.get("format") {
            if format != "csv" {
                return Err(err(*line, format!("unsupported format `{format}` (csv)")));
            }
        }
        if let Some((line, raw)) = map.get("metrics") {
            metrics = MetricSelection {
                marginals: false,
                visibility: false,
                interference: false,
            };
            for token in raw.split_whitespace() {
                match token {
                    "marginals" => metrics.marginals = true,
                    "visibility" => metrics.visibility = true,
                    "interference" => metrics.interference = true,
                    other => {
                        return Err(err(
                            *line,
                            format!(
                                "unknown metric `{other}` (marginals | visibility | interference)"
                            ),
                        ))
                    }
                }
            }
        }
    }

    if let Some((_, map)) = &sections.meta {
        reject_unknown(map, "meta", &["version"])?;
    }

    Ok(ScenarioFile {
        spec: ScenarioSpec {
            grid,
            source,
            slits: SlitGeometry { d, q_f },
            elements,
            planes,
            metrics,
        },
        output,
    })
}

fn print_element(element: &ElementSpec) -> String {
    match element {
        ElementSpec::FreeSpace { tau } => format!("free_space tau={tau}"),
        ElementSpec::Lens { k_param } => format!("lens K={k_param}"),
        ElementSpec::Tilt { p0 } => format!("tilt p0={p0}"),
        ElementSpec::DetectorFilter { q_d, center } => {
            format!("detector_filter q_d={q_d} center={center}")
        }
    }
}

/// Canonical text form; parsing it reproduces the input exactly, so the
/// emitted run manifest doubles as a replayable scenario file.
pub fn print_scenario(file: &ScenarioFile, version: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(version) = version {
        out.push_str("[meta]\n");
        out.push_str(&format!("version = {version}\n\n"));
    }
    out.push_str("[grid]\n");
    out.push_str(&format!("n = {}\n", file.spec.grid.n));
    out.push_str(&format!("extent = {}\n\n", file.spec.grid.extent));
    out.push_str("[source]\n");
    match file.spec.source {
        SourceSpec::Gaussian { q_i, delta } => {
            out.push_str("kind = gaussian\n");
            out.push_str(&format!("q_i = {q_i}\n"));
            out.push_str(&format!("delta = {delta}\n"));
        }
        SourceSpec::Cat => out.push_str("kind = cat\n"),
        SourceSpec::LensOutput { k_param, p0 } => {
            out.push_str("kind = lens_output\n");
            out.push_str(&format!("K = {k_param}\n"));
            out.push_str(&format!("p0 = {p0}\n"));
        }
    }
    out.push_str("\n[slits]\n");
    out.push_str(&format!("d = {}\n", file.spec.slits.d));
    out.push_str(&format!("q_f = {}\n", file.spec.slits.q_f));
    if !file.spec.elements.is_empty() {
        out.push_str("\n[elements]\n");
        for element in &file.spec.elements {
            out.push_str(&print_element(element));
            out.push('\n');
        }
    }
    out.push_str("\n[planes]\n");
    let taus: Vec<String> = file.spec.planes.iter().map(|t| t.to_string()).collect();
    out.push_str(&format!("tau = {}\n", taus.join(" ")));
    out.push_str("\n[output]\n");
    if let Some(dir) = &file.output.directory {
        out.push_str(&format!("directory = {dir}\n"));
    }
    out.push_str("format = csv\n");
    let mut metric_names = Vec::new();
    if file.spec.metrics.marginals {
        metric_names.push("marginals");
    }
    if file.spec.metrics.visibility {
        metric_names.push("visibility");
    }
    if file.spec.metrics.interference {
        metric_names.push("interference");
    }
    out.push_str(&format!("metrics = {}\n", metric_names.join(" ")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[source]
kind = gaussian
q_i = 8

[slits]
d = 4
q_f = 1

[planes]
tau = 0 5
";

    #[test]
    fn minimal_file_gets_defaults() {
        let parsed = parse_scenario(MINIMAL).unwrap();
        assert_eq!(parsed.spec.grid, GridSpec::default());
        assert_eq!(
            parsed.spec.source,
            SourceSpec::Gaussian {
                q_i: 8.0,
                delta: 0.0
            }
        );
        assert_eq!(parsed.spec.planes, vec![0.0, 5.0]);
        assert!(parsed.spec.elements.is_empty());
        assert_eq!(parsed.spec.metrics, MetricSelection::default());
    }

    #[test]
    fn constraint_errors_cite_lines() {
        let bad = MINIMAL.replace("q_f = 1", "q_f = -1");
        let e = parse_scenario(&bad).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(e.message.contains("q_f"), "{e}");
    }

    #[test]
    fn unknown_keys_and_duplicate_sections_are_rejected() {
        let extra = format!("{MINIMAL}\n[slits]\nd = 4\nq_f = 1\n");
        assert!(parse_scenario(&extra)
            .unwrap_err()
            .message
            .contains("duplicate"));
        let unknown = MINIMAL.replace("q_i = 8", "q_i = 8\nwobble = 3");
        let e = parse_scenario(&unknown).unwrap_err();
        assert!(e.message.contains("wobble"), "{e}");
    }

    #[test]
    fn lens_output_parameters_parse() {
        let text = "\
[source]
kind = lens_output
K = 2
p0 = 3

[slits]
d = 4
q_f = 1

[planes]
tau = 0 1 3
";
        let parsed = parse_scenario(text).unwrap();
        assert_eq!(
            parsed.spec.source,
            SourceSpec::LensOutput {
                k_param: 2.0,
                p0: 3.0
            }
        );
        assert_eq!(parsed.spec.planes, vec![0.0, 1.0, 3.0]);
    }

    #[test]
    fn elements_parse_in_order() {
        let text = "\
[source]
kind = cat

[slits]
d = 4
q_f = 1

[elements]
detector_filter q_d=2.4 center=4
free_space tau=1.5
lens K=2
tilt p0=-3
";
        let parsed = parse_scenario(text).unwrap();
        assert_eq!(
            parsed.spec.elements,
            vec![
                ElementSpec::DetectorFilter {
                    q_d: 2.4,
                    center: 4.0
                },
                ElementSpec::FreeSpace { tau: 1.5 },
                ElementSpec::Lens { k_param: 2.0 },
                ElementSpec::Tilt { p0: -3.0 },
            ]
        );
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "\
[grid]
n = 512
extent = 48

[source]
kind = lens_output
K = 2
p0 = 3

[slits]
d = 4
q_f = 1

[elements]
detector_filter q_d=2.4 center=4
free_space tau=0.25

[planes]
tau = 0 1 3

[output]
directory = out/delayed
metrics = visibility interference
";
        let parsed = parse_scenario(text).unwrap();
        let printed = print_scenario(&parsed, Some("0.1.0"));
        let reparsed = parse_scenario(&printed).unwrap();
        assert_eq!(parsed, reparsed);
        // and printing is a fixed point
        assert_eq!(printed, print_scenario(&reparsed, Some("0.1.0")));
    }

    #[test]
    fn unsorted_planes_rejected_at_parse() {
        let bad = MINIMAL.replace("tau = 0 5", "tau = 5 0");
        let e = parse_scenario(&bad).unwrap_err();
        assert!(e.message.contains("sorted"), "{e}");
    }
}
