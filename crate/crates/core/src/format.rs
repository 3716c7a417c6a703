//! Text formats for matroids and instances.
//!
//! A matroid file is line oriented; `#` starts a comment. The first directive
//! is `type` followed by one of `linear`, `graphic`, `uniform`, `table`:
//!
//! ```text
//! type linear          type graphic       type uniform      type table
//! field 2              vertices 4         rank 2            size 2
//! rows 2               edges              size 4            0 0
//! matrix               0 1                                  1 1
//! 1010                 1 2                                  2 1
//! 0101                 2 3                                  3 1
//! labels a b c d       3 0
//! ```
//!
//! A uniform matroid may instead list `block r n` lines, one per summand of a
//! direct sum on consecutive elements. An optional `labels` line names the
//! elements in index order (default `e1 … en`).
//!
//! An instance file is a matroid body, or `matroid <path>` relative to the
//! instance file, plus the four directives `Q`, `R`, `S`, `T`, each followed by
//! element labels.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::intertwine::Instance;
use crate::matroid::{
    GraphicMatroid, LinearMatroid, Matroid, TableMatroid, UniformMatroid, UniformSum, TABLE_MAX_ELEMENTS,
};
use crate::subset::{submasks, GroundSet, Subset, MAX_ELEMENTS};

const KEYWORDS: &[&str] =
    &["type", "field", "rows", "matrix", "vertices", "edges", "rank", "size", "block", "labels"];
const SET_NAMES: [&str; 4] = ["Q", "R", "S", "T"];

/// A non-empty line split into tokens, with its 1-based line number.
#[derive(Clone, Debug)]
struct Line<'a> {
    no: usize,
    tokens: Vec<&'a str>,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            (!tokens.is_empty()).then_some(Line { no: i + 1, tokens })
        })
        .collect()
}

fn number<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token.parse().map_err(|_| Error::parse(line, format!("expected {what}, found `{token}`")))
}

fn mask(line: usize, token: &str) -> Result<u32> {
    let parsed = match token.strip_prefix("0b") {
        Some(bits) => u32::from_str_radix(bits, 2).ok(),
        None => token.parse().ok(),
    };
    parsed.ok_or_else(|| Error::parse(line, format!("expected a subset mask, found `{token}`")))
}

/// `directive value` with exactly one argument.
fn single<'a>(line: &Line<'a>) -> Result<&'a str> {
    match line.tokens.as_slice() {
        [_, v] => Ok(v),
        _ => Err(Error::parse(line.no, format!("`{}` takes exactly one value", line.tokens[0]))),
    }
}

fn cap(n: usize) -> Result<()> {
    if n > MAX_ELEMENTS {
        Err(Error::SizeCap(n))
    } else {
        Ok(())
    }
}

/// Directives of a matroid body, keyed by name, plus the data lines that follow blocks.
#[derive(Default)]
struct Body<'a> {
    directives: HashMap<&'a str, Line<'a>>,
    blocks: Vec<Line<'a>>,
    data: HashMap<&'a str, Vec<Line<'a>>>,
}

impl<'a> Body<'a> {
    fn collect(input: &[Line<'a>]) -> Result<Body<'a>> {
        let mut body = Body::default();
        let mut block: Option<&'a str> = None;
        for line in input {
            let head = line.tokens[0];
            if !KEYWORDS.contains(&head) {
                match block {
                    Some(name) => body.data.entry(name).or_default().push(line.clone()),
                    None => return Err(Error::parse(line.no, format!("unknown directive `{head}`"))),
                }
                continue;
            }
            if body.directives.is_empty() && head != "type" {
                return Err(Error::parse(line.no, "the first directive must be `type`"));
            }
            block = None;
            match head {
                "block" => body.blocks.push(line.clone()),
                _ if body.directives.contains_key(head) => {
                    return Err(Error::parse(line.no, format!("duplicate `{head}` directive")));
                }
                _ => {
                    body.directives.insert(head, line.clone());
                }
            }
            match head {
                "matrix" | "edges" => block = Some(head),
                "size" => block = Some("size"),
                _ => {}
            }
        }
        Ok(body)
    }

    fn get(&self, name: &str) -> Option<&Line<'a>> {
        self.directives.get(name)
    }

    fn require(&self, name: &str, after: usize) -> Result<&Line<'a>> {
        self.get(name).ok_or_else(|| Error::parse(after, format!("missing `{name}` directive")))
    }

    fn value<T: std::str::FromStr>(&self, name: &str, after: usize, what: &str) -> Result<T> {
        let line = self.require(name, after)?;
        number(line.no, single(line)?, what)
    }

    fn rows(&self, name: &str) -> &[Line<'a>] {
        self.data.get(name).map_or(&[], Vec::as_slice)
    }

    fn reject(&self, allowed: &[&str], kind: &str) -> Result<()> {
        let mut extra: Vec<&Line> = self.directives.values().filter(|l| !allowed.contains(&l.tokens[0])).collect();
        if !self.blocks.is_empty() && !allowed.contains(&"block") {
            extra.push(&self.blocks[0]);
        }
        for (name, data) in &self.data {
            if !allowed.contains(name) || (*name == "size" && kind != "table") {
                extra.push(&data[0]);
            }
        }
        match extra.into_iter().min_by_key(|l| l.no) {
            Some(l) if l.tokens[0].parse::<u64>().is_ok() => {
                Err(Error::parse(l.no, format!("unexpected data line for a {kind} matroid")))
            }
            Some(l) => Err(Error::parse(l.no, format!("`{}` is not valid for a {kind} matroid", l.tokens[0]))),
            None => Ok(()),
        }
    }
}

/// Wraps construction errors with the line of the `type` directive; size-cap
/// errors pass through unchanged.
fn at_line(line: usize, e: Error) -> Error {
    match e {
        Error::SizeCap(_) | Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    }
}

fn parse_body(input: &[Line]) -> Result<Matroid> {
    let Some(first) = input.first() else {
        return Err(Error::parse(1, "empty matroid description"));
    };
    let body = Body::collect(input)?;
    let type_line = body.require("type", first.no)?;
    let kind = single(type_line)?;
    let t = type_line.no;
    let labels = body.get("labels").map(|l| (l.no, l.tokens[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>()));
    let build = |oracle_size: usize, m: Result<Matroid>| -> Result<Matroid> {
        let m = m.map_err(|e| at_line(t, e))?;
        match &labels {
            None => Ok(m),
            Some((no, names)) => {
                if names.len() != oracle_size {
                    return Err(Error::parse(
                        *no,
                        format!("{} labels given for {oracle_size} elements", names.len()),
                    ));
                }
                cap(names.len())?;
                let ground = GroundSet::new(names.clone()).map_err(|e| at_line(*no, e))?;
                m.relabel(ground).map_err(|e| at_line(*no, e))
            }
        }
    };
    match kind {
        "linear" => {
            body.reject(&["type", "field", "rows", "matrix", "labels"], kind)?;
            let prime: u8 = body.value("field", t, "a prime")?;
            let rows: usize = body.value("rows", t, "a row count")?;
            let data = body.rows("matrix");
            if rows > 0 {
                body.require("matrix", t)?;
            }
            if data.len() != rows {
                let no = data.get(rows).or(data.last()).map_or(body.get("matrix").map_or(t, |l| l.no), |l| l.no);
                return Err(Error::parse(no, format!("expected {rows} matrix rows, found {}", data.len())));
            }
            let mut matrix = Vec::with_capacity(rows);
            for line in data {
                let entries: Vec<u8> = if line.tokens.len() == 1 {
                    line.tokens[0]
                        .chars()
                        .map(|c| c.to_digit(10).map(|d| d as u8))
                        .collect::<Option<_>>()
                        .ok_or_else(|| Error::parse(line.no, format!("bad matrix row `{}`", line.tokens[0])))?
                } else {
                    line.tokens.iter().map(|tok| number(line.no, tok, "a matrix entry")).collect::<Result<_>>()?
                };
                cap(entries.len())?;
                if let Some(prev) = matrix.last().map(Vec::len) {
                    if prev != entries.len() {
                        return Err(Error::parse(line.no, format!("row has {} entries, expected {prev}", entries.len())));
                    }
                }
                matrix.push(entries);
            }
            let n = match (matrix.first(), &labels) {
                (Some(row), _) => row.len(),
                (None, Some((_, names))) => names.len(),
                (None, None) => 0,
            };
            cap(n)?;
            build(n, LinearMatroid::with_columns(prime, n, matrix).and_then(Matroid::new))
        }
        "graphic" => {
            body.reject(&["type", "vertices", "edges", "labels"], kind)?;
            let vertices: usize = body.value("vertices", t, "a vertex count")?;
            let data = body.rows("edges");
            if !data.is_empty() || body.get("edges").is_none() {
                body.require("edges", t)?;
            }
            cap(data.len())?;
            let mut edges = Vec::with_capacity(data.len());
            for line in data {
                let [u, v] = line.tokens[..] else {
                    return Err(Error::parse(line.no, "an edge line is `u v`"));
                };
                let (u, v): (usize, usize) = (number(line.no, u, "a vertex")?, number(line.no, v, "a vertex")?);
                if u >= vertices || v >= vertices {
                    return Err(Error::parse(line.no, format!("vertex out of range 0..{vertices}")));
                }
                edges.push((u, v));
            }
            let n = edges.len();
            build(n, GraphicMatroid::new(vertices, edges).and_then(Matroid::new))
        }
        "uniform" if !body.blocks.is_empty() => {
            body.reject(&["type", "block", "labels"], kind)?;
            let mut blocks = Vec::with_capacity(body.blocks.len());
            for line in &body.blocks {
                let [_, r, n] = line.tokens[..] else {
                    return Err(Error::parse(line.no, "a block line is `block r n`"));
                };
                blocks.push((number(line.no, r, "a rank")?, number(line.no, n, "a size")?));
            }
            let n = blocks.iter().map(|b: &(u32, usize)| b.1).sum();
            cap(n)?;
            build(n, UniformSum::new(blocks).and_then(Matroid::new))
        }
        "uniform" => {
            body.reject(&["type", "rank", "size", "labels"], kind)?;
            let rank: u32 = body.value("rank", t, "a rank")?;
            let n: usize = body.value("size", t, "a size")?;
            cap(n)?;
            build(n, UniformMatroid::new(rank, n).and_then(Matroid::new))
        }
        "table" => {
            body.reject(&["type", "size", "labels"], kind)?;
            let size_line = body.require("size", t)?;
            let n: usize = number(size_line.no, single(size_line)?, "a size")?;
            cap(n)?;
            if n > TABLE_MAX_ELEMENTS {
                return Err(Error::parse(size_line.no, format!("rank tables are limited to {TABLE_MAX_ELEMENTS} elements")));
            }
            let mut ranks = vec![None; 1 << n];
            let data = body.rows("size");
            for line in data {
                let [x, r] = line.tokens[..] else {
                    return Err(Error::parse(line.no, "a table line is `mask rank`"));
                };
                let x = mask(line.no, x)?;
                if !Subset(x).fits(n) {
                    return Err(Error::parse(line.no, format!("mask {x} names an element outside {n}")));
                }
                if ranks[x as usize].replace(number(line.no, r, "a rank")?).is_some() {
                    return Err(Error::parse(line.no, format!("mask {x} listed twice")));
                }
            }
            let last = data.last().map_or(size_line.no, |l| l.no);
            let ranks = ranks
                .into_iter()
                .enumerate()
                .map(|(x, r)| r.ok_or_else(|| Error::parse(last, format!("no rank given for mask {x}"))))
                .collect::<Result<Vec<u32>>>()?;
            build(n, TableMatroid::new(n, ranks).and_then(Matroid::new))
        }
        other => Err(Error::parse(t, format!("unknown matroid type `{other}`"))),
    }
}

pub fn parse_matroid(text: &str) -> Result<Matroid> {
    parse_body(&lines(text))
}

/// Parses an instance. `base` resolves `matroid <path>` references.
pub fn parse_instance(text: &str, base: Option<&Path>) -> Result<Instance> {
    let all = lines(text);
    let mut sets: [Option<Line>; 4] = Default::default();
    let mut reference: Option<Line> = None;
    let mut body = Vec::new();
    for line in all {
        let head = line.tokens[0];
        if let Some(i) = SET_NAMES.iter().position(|&n| n == head) {
            if sets[i].is_some() {
                return Err(Error::parse(line.no, format!("duplicate `{head}` directive")));
            }
            sets[i] = Some(line);
        } else if head == "matroid" {
            if reference.is_some() {
                return Err(Error::parse(line.no, "duplicate `matroid` directive"));
            }
            reference = Some(line);
        } else {
            body.push(line);
        }
    }
    let matroid = match reference {
        Some(line) => {
            if let Some(extra) = body.first() {
                return Err(Error::parse(extra.no, "an instance with a `matroid` reference has no inline body"));
            }
            let rel = single(&line)?;
            let path = base.map_or_else(|| Path::new(rel).to_path_buf(), |b| b.join(rel));
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::parse(line.no, format!("cannot read {}: {e}", path.display())))?;
            parse_matroid(&text).map_err(|e| match e {
                Error::Parse { line: inner, msg } => {
                    Error::parse(line.no, format!("{}: line {inner}: {msg}", path.display()))
                }
                other => other,
            })?
        }
        None if body.is_empty() => return Err(Error::parse(1, "no matroid given")),
        None => parse_body(&body)?,
    };
    let last = text.lines().count().max(1);
    let mut masks = [Subset::EMPTY; 4];
    let mut line_of = [last; 4];
    for (i, slot) in sets.iter().enumerate() {
        let line = slot.as_ref().ok_or_else(|| Error::parse(last, format!("missing `{}` directive", SET_NAMES[i])))?;
        line_of[i] = line.no;
        for &label in &line.tokens[1..] {
            let e = matroid
                .ground()
                .index_of(label)
                .ok_or_else(|| Error::parse(line.no, format!("unknown element `{label}`")))?;
            if masks[i].contains(e) {
                return Err(Error::parse(line.no, format!("element `{label}` listed twice")));
            }
            masks[i] = masks[i].with(e);
        }
    }
    for (a, b) in [(0, 1), (2, 3)] {
        if let Some(e) = (masks[a] & masks[b]).first() {
            return Err(Error::parse(
                line_of[a].max(line_of[b]),
                format!("{} and {} share element `{}`", SET_NAMES[a], SET_NAMES[b], matroid.ground().label(e)),
            ));
        }
    }
    Instance::new(matroid, masks[0], masks[1], masks[2], masks[3])
}

/// Reads an instance file; `matroid` references resolve against its directory.
pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text, path.parent())
}

/// Serializes any matroid. Dual and minor views are written as rank tables,
/// which limits them to the table size.
pub fn write_matroid(m: &Matroid) -> Result<String> {
    let mut out = String::new();
    let leaf = m.oracle().map(|o| o.as_any());
    if let Some(g) = leaf.and_then(|a| a.downcast_ref::<GraphicMatroid>()) {
        let _ = writeln!(out, "type graphic\nvertices {}\nedges", g.vertex_count());
        for (u, v) in g.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
    } else if let Some(l) = leaf.and_then(|a| a.downcast_ref::<LinearMatroid>()) {
        let _ = writeln!(out, "type linear\nfield {}\nrows {}", l.prime(), l.matrix().len());
        if !l.matrix().is_empty() {
            out.push_str("matrix\n");
        }
        for row in l.matrix() {
            let digits: String = row.iter().map(|&d| char::from(b'0' + d)).collect();
            let _ = writeln!(out, "{digits}");
        }
    } else if let Some(u) = leaf.and_then(|a| a.downcast_ref::<UniformMatroid>()) {
        let _ = writeln!(out, "type uniform\nrank {}\nsize {}", u.rank_value(), m.len());
    } else if let Some(u) = leaf.and_then(|a| a.downcast_ref::<UniformSum>()) {
        out.push_str("type uniform\n");
        for (r, n) in u.blocks() {
            let _ = writeln!(out, "block {r} {n}");
        }
    } else {
        if m.len() > TABLE_MAX_ELEMENTS {
            return Err(Error::InvalidArgument(format!(
                "a derived matroid on {} elements is too large to write as a rank table",
                m.len()
            )));
        }
        let _ = writeln!(out, "type table\nsize {}", m.len());
        for x in submasks(m.full()) {
            let _ = writeln!(out, "{} {}", x.0, m.rank_unchecked(x));
        }
    }
    let _ = writeln!(out, "labels {}", m.ground().labels().join(" "));
    Ok(out)
}

/// Self-contained instance text with the matroid inline.
pub fn write_instance(inst: &Instance) -> Result<String> {
    let mut out = write_matroid(&inst.matroid)?;
    let ground = inst.matroid.ground();
    for (name, set) in SET_NAMES.iter().zip([inst.q, inst.r, inst.s, inst.t]) {
        let labels: Vec<&str> = set.iter().map(|i| ground.label(i)).collect();
        if labels.is_empty() {
            let _ = writeln!(out, "{name}");
        } else {
            let _ = writeln!(out, "{name} {}", labels.join(" "));
        }
    }
    Ok(out)
}
