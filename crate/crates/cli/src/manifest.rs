//! Plain-text manifests: sections of `key = expression` lines and a task
//! list.
//!
//! ```text
//! [chart]
//! n = 2
//!
//! [connection]
//! Gamma[1][2][2] = x1
//!
//! [transition]
//! forward[1] = x1 + x2^2
//! forward[2] = x2
//! inverse[1] = x1 - x2^2
//! inverse[2] = x2
//!
//! [tasks]
//! verify-closed k=1
//! transition-check
//! pullback k=1
//! integrate fixture=flat_t4 k=2 grid=16
//! ```
//!
//! `[metric]` with entries `g[i][j] = ...` (`i <= j`) may replace
//! `[connection]`; the section is then the Levi-Civita connection. Lines
//! starting with `#` are comments.

use std::collections::BTreeMap;

use thetahat_core::chernweil::{levi_civita, ConnectionSection, MetricSpec};
use thetahat_core::connspace::ChartTransition;
use thetahat_core::forms::Form;
use thetahat_core::matrix::ExprMatrix;
use thetahat_core::symkernel::Expr;
use thetahat_core::{Error, Result};

use crate::dsl::{parse_expr_at, parse_form_at, Origin};

#[derive(Clone, Debug, PartialEq)]
pub enum Task {
    VerifyClosed { k: usize },
    TransitionCheck,
    Pullback { target: PullbackTarget },
    Integrate(IntegrateTask),
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::VerifyClosed { .. } => "verify-closed",
            Task::TransitionCheck => "transition-check",
            Task::Pullback { .. } => "pullback",
            Task::Integrate(_) => "integrate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PullbackTarget {
    /// `ω_k` of the connection chart.
    Omega(usize),
    /// An arbitrary form on the connection chart.
    Form(Form),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrateTask {
    pub fixture: String,
    pub k: usize,
    pub grid: usize,
    pub seed: u64,
    pub eps: f64,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug)]
pub enum SectionSource {
    Connection(ConnectionSection),
    Metric(MetricSpec),
}

#[derive(Clone, Debug)]
pub struct Manifest {
    pub n: usize,
    pub source: Option<SectionSource>,
    pub transition: Option<ChartTransition>,
    pub tasks: Vec<Task>,
}

impl Manifest {
    /// The connection section, Levi-Civita when a metric was given.
    pub fn section(&self) -> Result<Option<ConnectionSection>> {
        match &self.source {
            None => Ok(None),
            Some(SectionSource::Connection(s)) => Ok(Some(s.clone())),
            Some(SectionSource::Metric(m)) => levi_civita(m).map(Some),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Chart,
    Connection,
    Metric,
    Transition,
    Tasks,
}

struct Line<'a> {
    number: usize,
    /// Column of the first character of `text`.
    column: usize,
    text: &'a str,
}

impl Line<'_> {
    fn error(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::parse(self.number, self.column + offset, message)
    }
}

fn chars_before(text: &str, byte: usize) -> usize {
    text[..byte].chars().count()
}

/// `name[a][b]...` into the name and its indices.
fn split_indexed<'a>(line: &Line, key: &'a str, key_col: usize) -> Result<(&'a str, Vec<usize>)> {
    let (name, mut rest) = match key.find('[') {
        Some(p) => (&key[..p], &key[p..]),
        None => (key, ""),
    };
    let mut out = Vec::new();
    while !rest.is_empty() {
        let at = key_col + chars_before(key, key.len() - rest.len());
        let Some(close) = rest.find(']').filter(|_| rest.starts_with('[')) else {
            return Err(line.error(at, format!("malformed index in '{key}'")));
        };
        let digits = rest[1..close].trim();
        let v: usize = digits
            .parse()
            .map_err(|_| line.error(at + 1, format!("index '{digits}' is not a positive integer")))?;
        out.push(v);
        rest = &rest[close + 1..];
    }
    Ok((name.trim_end(), out))
}

fn check_indices(line: &Line, idx: &[usize], n: usize, want: usize, key: &str, col: usize) -> Result<()> {
    if idx.len() != want {
        return Err(line.error(col, format!("'{key}' needs {want} indices")));
    }
    if let Some(bad) = idx.iter().find(|&&i| i < 1 || i > n) {
        return Err(line.error(col, format!("index {bad} outside 1..={n}")));
    }
    Ok(())
}

struct Builder {
    n: Option<usize>,
    gamma: BTreeMap<(usize, usize, usize), Expr>,
    metric: BTreeMap<(usize, usize), Expr>,
    forward: BTreeMap<usize, Expr>,
    inverse: BTreeMap<usize, Expr>,
    seen: Vec<Section>,
    tasks: Vec<Task>,
    first: BTreeMap<&'static str, usize>,
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let mut b = Builder {
        n: None,
        gamma: BTreeMap::new(),
        metric: BTreeMap::new(),
        forward: BTreeMap::new(),
        inverse: BTreeMap::new(),
        seen: Vec::new(),
        tasks: Vec::new(),
        first: BTreeMap::new(),
    };
    let mut current: Option<Section> = None;
    let mut transition_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let trimmed = raw.trim_start();
        let column = 1 + chars_before(raw, raw.len() - trimmed.len());
        let body = trimmed.trim_end();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let line = Line {
            number,
            column,
            text: body,
        };
        if body.starts_with('[') && !body.contains('=') {
            let Some(name) = body.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
                return Err(line.error(0, "unterminated section header"));
            };
            let section = match name.trim() {
                "chart" => Section::Chart,
                "connection" => Section::Connection,
                "metric" => Section::Metric,
                "transition" => Section::Transition,
                "tasks" => Section::Tasks,
                other => return Err(line.error(1, format!("unknown section '{other}'"))),
            };
            if b.seen.contains(&section) {
                return Err(line.error(0, format!("section [{}] appears twice", name.trim())));
            }
            if section != Section::Chart && section != Section::Tasks && b.n.is_none() {
                return Err(line.error(0, "[chart] with n must come first"));
            }
            if section == Section::Transition {
                transition_line = number;
            }
            b.seen.push(section);
            current = Some(section);
            continue;
        }
        match current {
            None => return Err(line.error(0, "entry outside any section")),
            Some(Section::Tasks) => b.tasks.push(parse_task(&line, b.n)?),
            Some(section) => b.entry(section, &line)?,
        }
    }
    let n = b.n.ok_or_else(|| Error::parse(1, 1, "missing [chart] section with n"))?;
    if b.seen.contains(&Section::Connection) && b.seen.contains(&Section::Metric) {
        let at = b.first.get("metric").copied().unwrap_or(1);
        return Err(Error::parse(at, 1, "give either [connection] or [metric], not both"));
    }
    let source = if b.seen.contains(&Section::Metric) {
        let mut g: ExprMatrix = vec![vec![Expr::zero(); n]; n];
        for ((i, j), e) in &b.metric {
            g[i - 1][j - 1] = e.clone();
            g[j - 1][i - 1] = e.clone();
        }
        let at = b.first.get("metric").copied().unwrap_or(1);
        let m = MetricSpec::new(g).map_err(|e| Error::parse(at, 1, e.to_string()))?;
        Some(SectionSource::Metric(m))
    } else if b.seen.contains(&Section::Connection) {
        let at = b.first.get("connection").copied().unwrap_or(1);
        let s = ConnectionSection::new(n, b.gamma.clone()).map_err(|e| Error::parse(at, 1, e.to_string()))?;
        Some(SectionSource::Connection(s))
    } else {
        None
    };
    let transition = if b.seen.contains(&Section::Transition) {
        let mut fw = Vec::with_capacity(n);
        let mut inv = Vec::with_capacity(n);
        for i in 1..=n {
            let missing = |which: &str| Error::parse(transition_line, 1, format!("missing {which}[{i}]"));
            fw.push(b.forward.get(&i).cloned().ok_or_else(|| missing("forward"))?);
            inv.push(b.inverse.get(&i).cloned().ok_or_else(|| missing("inverse"))?);
        }
        let t = ChartTransition::new(fw, inv).map_err(|e| Error::parse(transition_line, 1, e.to_string()))?;
        Some(t)
    } else {
        None
    };
    Ok(Manifest {
        n,
        source,
        transition,
        tasks: b.tasks,
    })
}

impl Builder {
    fn entry(&mut self, section: Section, line: &Line) -> Result<()> {
        let Some(eq) = line.text.find('=') else {
            return Err(line.error(0, "expected 'key = value'"));
        };
        let key = line.text[..eq].trim_end();
        let value_raw = &line.text[eq + 1..];
        let value = value_raw.trim_start();
        let value_col = chars_before(line.text, eq + 1) + chars_before(value_raw, value_raw.len() - value.len());
        if value.is_empty() {
            return Err(line.error(value_col, format!("missing value for '{key}'")));
        }
        let origin = Origin {
            line: line.number,
            column: line.column + value_col,
        };
        if section == Section::Chart {
            if key != "n" {
                return Err(line.error(0, format!("unknown chart key '{key}'")));
            }
            if self.n.is_some() {
                return Err(line.error(0, "n given twice"));
            }
            let n: usize = value
                .parse()
                .ok()
                .filter(|n| (1..=8).contains(n))
                .ok_or_else(|| line.error(value_col, format!("n must be an integer in 1..=8, found '{value}'")))?;
            self.n = Some(n);
            return Ok(());
        }
        let n = self.n.expect("checked at the section header");
        let (name, idx) = split_indexed(line, key, 0)?;
        let expr = || parse_expr_at(value, Some(n), origin);
        match (section, name) {
            (Section::Connection, "Gamma") => {
                check_indices(line, &idx, n, 3, key, 0)?;
                let (k, i, j) = (idx[0], idx[1], idx[2]);
                if i > j {
                    return Err(line.error(0, format!("give Gamma[{k}][{j}][{i}] instead of Gamma[{k}][{i}][{j}]")));
                }
                if self.gamma.contains_key(&(k, i, j)) {
                    return Err(line.error(0, format!("Gamma[{k}][{i}][{j}] given twice")));
                }
                self.first.entry("connection").or_insert(line.number);
                self.gamma.insert((k, i, j), expr()?);
            }
            (Section::Metric, "g") => {
                check_indices(line, &idx, n, 2, key, 0)?;
                let (i, j) = (idx[0], idx[1]);
                if i > j {
                    return Err(line.error(0, format!("give g[{j}][{i}] instead of g[{i}][{j}]")));
                }
                if self.metric.contains_key(&(i, j)) {
                    return Err(line.error(0, format!("g[{i}][{j}] given twice")));
                }
                self.first.entry("metric").or_insert(line.number);
                self.metric.insert((i, j), expr()?);
            }
            (Section::Transition, "forward" | "inverse") => {
                check_indices(line, &idx, n, 1, key, 0)?;
                let map = if name == "forward" { &mut self.forward } else { &mut self.inverse };
                if map.contains_key(&idx[0]) {
                    return Err(line.error(0, format!("{key} given twice")));
                }
                let e = parse_expr_at(value, Some(n), origin)?;
                map.insert(idx[0], e);
            }
            _ => return Err(line.error(0, format!("unknown key '{key}'"))),
        }
        Ok(())
    }
}

fn parse_task(line: &Line, n: Option<usize>) -> Result<Task> {
    let text = line.text;
    let name_end = text.find(char::is_whitespace).unwrap_or(text.len());
    let name = &text[..name_end];
    // `form=` swallows the rest of the line
    let mut params: BTreeMap<&str, (&str, usize)> = BTreeMap::new();
    let mut key_cols: BTreeMap<&str, usize> = BTreeMap::new();
    let mut rest = &text[name_end..];
    loop {
        let trimmed = rest.trim_start();
        if trimmed.is_empty() {
            break;
        }
        let col = chars_before(text, text.len() - trimmed.len());
        let Some(eq) = trimmed.find('=') else {
            return Err(line.error(col, "expected 'key=value'"));
        };
        let key = &trimmed[..eq];
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(line.error(col, "expected 'key=value'"));
        }
        let after = &trimmed[eq + 1..];
        let (value, next) = if key == "form" {
            (after.trim_end(), "")
        } else {
            let end = after.find(char::is_whitespace).unwrap_or(after.len());
            (&after[..end], &after[end..])
        };
        key_cols.insert(key, col);
        if params.insert(key, (value, col + chars_before(trimmed, eq + 1))).is_some() {
            return Err(line.error(col, format!("parameter '{key}' given twice")));
        }
        rest = next;
    }
    let mut take = |key: &str| params.remove(key);
    let task = match name {
        "verify-closed" => Task::VerifyClosed {
            k: number(line, take("k"), "k")?.ok_or_else(|| line.error(0, "verify-closed needs k"))?,
        },
        "transition-check" => Task::TransitionCheck,
        "pullback" => {
            let k = number::<usize>(line, take("k"), "k")?;
            let form = take("form");
            let target = match (k, form) {
                (Some(k), None) => PullbackTarget::Omega(k),
                (None, Some((text, col))) => {
                    let n = n.ok_or_else(|| line.error(0, "[chart] must precede pullback"))?;
                    let origin = Origin {
                        line: line.number,
                        column: line.column + col,
                    };
                    PullbackTarget::Form(parse_form_at(text, n, origin)?)
                }
                _ => return Err(line.error(0, "pullback needs exactly one of k or form")),
            };
            Task::Pullback { target }
        }
        "integrate" => {
            let fixture = take("fixture").ok_or_else(|| line.error(0, "integrate needs fixture"))?.0.to_string();
            Task::Integrate(IntegrateTask {
                fixture,
                k: number(line, take("k"), "k")?.ok_or_else(|| line.error(0, "integrate needs k"))?,
                grid: number(line, take("grid"), "grid")?.unwrap_or(16),
                seed: number(line, take("seed"), "seed")?.unwrap_or(0),
                eps: number(line, take("eps"), "eps")?.unwrap_or(0.3),
                tol: number(line, take("tol"), "tol")?,
            })
        }
        other => return Err(line.error(0, format!("unknown task '{other}'"))),
    };
    if let Some(key) = params.into_keys().next() {
        return Err(line.error(key_cols[key], format!("unknown parameter '{key}' for {name}")));
    }
    Ok(task)
}

fn number<T: std::str::FromStr>(line: &Line, v: Option<(&str, usize)>, key: &str) -> Result<Option<T>> {
    match v {
        None => Ok(None),
        Some((text, col)) => text
            .parse()
            .map(Some)
            .map_err(|_| line.error(col, format!("'{text}' is not a valid {key}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn position(text: &str) -> (usize, usize, String) {
        match parse_manifest(text) {
            Err(Error::Parse { line, column, message }) => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    fn at(text: &str) -> (usize, usize) {
        let (line, column, _) = position(text);
        (line, column)
    }

    #[test]
    fn full_manifest() {
        let m = parse_manifest(
            "# quadratic change of chart\n[chart]\nn = 2\n\n[connection]\nGamma[1][2][2] = x1\n\
             [transition]\nforward[1] = x1 + x2^2\nforward[2] = x2\ninverse[1] = x1 - x2^2\ninverse[2] = x2\n\
             [tasks]\nverify-closed k=1\ntransition-check\npullback k=1\npullback form=dx1^dG[1][2][2]\n\
             integrate fixture=flat_t4 k=2 grid=16 tol=1e-9\n",
        )
        .unwrap();
        assert_eq!(m.n, 2);
        let s = m.section().unwrap().unwrap();
        assert_eq!(s.gamma(1, 2, 2), Expr::x(1));
        assert!(m.transition.is_some());
        assert_eq!(m.tasks.len(), 5);
        assert_eq!(m.tasks[0], Task::VerifyClosed { k: 1 });
        match &m.tasks[4] {
            Task::Integrate(t) => {
                assert_eq!((t.grid, t.k, t.tol), (16, 2, Some(1e-9)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn metric_gives_levi_civita() {
        let m = parse_manifest("[chart]\nn = 2\n[metric]\ng[1][1] = 1\ng[2][2] = x1^2\n").unwrap();
        let s = m.section().unwrap().unwrap();
        assert_eq!(s.gamma(1, 2, 2), Expr::x(1).neg());
    }

    #[test]
    fn rejects_lower_triangle_and_duplicates() {
        let (line, col, msg) = position("[chart]\nn = 2\n[connection]\nGamma[1][2][1] = x1\n");
        assert_eq!((line, col), (4, 1));
        assert!(msg.contains("Gamma[1][1][2]"), "{msg}");
        let (line, _, _) = position("[chart]\nn = 2\n[connection]\nGamma[1][1][2] = x1\n  Gamma[1][1][2] = x2\n");
        assert_eq!(line, 5);
    }

    #[test]
    fn errors_point_into_expressions() {
        assert_eq!(
            at("[chart]\nn = 2\n[connection]\n  Gamma[1][1][2] = x1 + x3\n"),
            (4, 25)
        );
        assert_eq!(at("[chart]\nn = 2\n[tasks]\npullback form=dx1 + dx7\n"), (4, 22));
        assert_eq!(at("[chart]\nn = 2\n[tasks]\nverify-closed k=two\n"), (4, 17));
        assert_eq!(at("[chart]\nn = 2\n[tasks]\nintegrate fixture=x k=1 bogus=3\n"), (4, 25));
        assert_eq!(at("[connection]\n"), (1, 1));
        assert_eq!(at("[chart]\nn = 0\n"), (2, 5));
        assert_eq!(at("[chart]\nn = 2\n[nonsense]\n"), (3, 2));
        assert_eq!(at("[chart]\nn = 2\n[transition]\nforward[1] = x1\n"), (3, 1));
        assert_eq!(at("[chart]\nn = 2\n[connection]\nGamma[1][1] = x1\n"), (4, 1));
        assert_eq!(at("[chart]\nn = 2\n[connection]\nGamma[1][1][x] = x1\n"), (4, 13));
    }

    #[test]
    fn either_connection_or_metric() {
        let (_, _, msg) = position("[chart]\nn = 1\n[connection]\nGamma[1][1][1] = 1\n[metric]\ng[1][1] = 1\n");
        assert!(msg.contains("not both"));
    }
}
