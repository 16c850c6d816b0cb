//! Line-oriented text format for features and feature sets.
//!
//! One feature per line, whitespace-separated attributes:
//!
//! ```text
//! rel reactive w=5.0 rot=all refl=yes last={0} el={0}:x el={1/6}:o el={-1/6}:o el={}:. act_to={}
//! ```
//!
//! See `docs/dsl.md` for the full grammar.

use std::fmt;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::topology::CellId;
use crate::walk::{Turn, Walk};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("empty feature set")]
    Empty,
    #[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
    Parse(Vec<ParseError>),
    #[error("reading feature set: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    /// `-`
    Off,
    /// `.`
    Empty,
    /// `o`: a piece of the mover.
    Friend,
    /// `x`: a piece not of the mover.
    Enemy,
    /// `Pn`
    Player(u32),
    /// `In`: a piece with item index `n`.
    Item(u32),
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementKind::Off => f.write_str("-"),
            ElementKind::Empty => f.write_str("."),
            ElementKind::Friend => f.write_str("o"),
            ElementKind::Enemy => f.write_str("x"),
            ElementKind::Player(n) => write!(f, "P{n}"),
            ElementKind::Item(n) => write!(f, "I{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub kind: ElementKind,
    pub negated: bool,
}

impl Constraint {
    pub fn is(kind: ElementKind) -> Self {
        Constraint { kind, negated: false }
    }

    pub fn not(kind: ElementKind) -> Self {
        Constraint { kind, negated: true }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!")?;
        }
        write!(f, "{}", self.kind)
    }
}

/// A site located by `walk` plus a conjunction of constraints on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternElement {
    pub walk: Walk,
    pub constraints: Vec<Constraint>,
}

impl PatternElement {
    pub fn new(walk: Walk, constraints: Vec<Constraint>) -> Self {
        PatternElement { walk, constraints }
    }

    /// The single positive constraint, if any.
    pub fn positive(&self) -> Option<ElementKind> {
        self.constraints.iter().find(|c| !c.negated).map(|c| c.kind)
    }

    /// Whether the site must be off the board for the element to hold.
    pub fn requires_off_board(&self) -> bool {
        self.positive() == Some(ElementKind::Off)
    }
}

impl fmt::Display for PatternElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.walk)?;
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureAction {
    pub to: Walk,
    pub from: Option<Walk>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Reactive,
    Proactive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    Relative,
    Absolute(CellId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rotations {
    All,
    /// Sorted ascending, no duplicates.
    Explicit(Vec<Turn>),
}

impl Rotations {
    pub fn explicit(mut turns: Vec<Turn>) -> Self {
        turns.sort();
        turns.dedup();
        Rotations::Explicit(turns)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub pattern: Vec<PatternElement>,
    pub action: FeatureAction,
    pub weight: f64,
    pub mode: Mode,
    pub scope: Scope,
    pub rotations: Rotations,
    pub reflections: bool,
    /// Where the opponent's last move sits relative to the anchor; reactive
    /// features only.
    pub last_move: Option<Walk>,
}

impl Feature {
    pub fn validate(&self) -> Result<(), String> {
        if !self.weight.is_finite() {
            return Err("weight must be finite".into());
        }
        if self.pattern.is_empty() {
            return Err("a feature needs at least one element".into());
        }
        match (self.mode, &self.last_move) {
            (Mode::Reactive, None) => return Err("reactive feature needs `last=`".into()),
            (Mode::Proactive, Some(_)) => return Err("`last=` is only allowed on reactive features".into()),
            _ => {}
        }
        for el in &self.pattern {
            check_constraints(&el.constraints)?;
        }
        if let Rotations::Explicit(t) = &self.rotations {
            if t.is_empty() {
                return Err("empty rotation list".into());
            }
        }
        Ok(())
    }
}

fn check_constraints(cs: &[Constraint]) -> Result<(), String> {
    if cs.is_empty() {
        return Err("element without constraints".into());
    }
    let mut positive: Option<ElementKind> = None;
    for c in cs.iter().filter(|c| !c.negated) {
        match positive {
            Some(p) if p != c.kind => return Err(format!("contradictory constraints `{p}` and `{}`", c.kind)),
            _ => positive = Some(c.kind),
        }
    }
    Ok(())
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scope {
            Scope::Relative => f.write_str("rel")?,
            Scope::Absolute(c) => write!(f, "abs={c}")?,
        }
        match self.mode {
            Mode::Reactive => f.write_str(" reactive")?,
            Mode::Proactive => f.write_str(" proactive")?,
        }
        write!(f, " w={:?}", self.weight)?;
        match &self.rotations {
            Rotations::All => f.write_str(" rot=all")?,
            Rotations::Explicit(t) => write!(f, " rot={}", Walk(t.clone()))?,
        }
        f.write_str(if self.reflections { " refl=yes" } else { " refl=no" })?;
        if let Some(l) = &self.last_move {
            write!(f, " last={l}")?;
        }
        for el in &self.pattern {
            write!(f, " el={el}")?;
        }
        write!(f, " act_to={}", self.action.to)?;
        if let Some(from) = &self.action.from {
            write!(f, " act_from={from}")?;
        }
        Ok(())
    }
}

pub fn serialize_feature(f: &Feature) -> String {
    f.to_string()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureSet {
    pub name: String,
    pub features: Vec<Feature>,
}

impl FeatureSet {
    pub fn new(name: impl Into<String>, features: Vec<Feature>) -> Self {
        FeatureSet { name: name.into(), features }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("name: {}\n", self.name));
        }
        for f in &self.features {
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, at: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.src[..at].chars().count() + 1, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '=' {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    /// Reads up to the next whitespace, keeping braces balanced so walks may
    /// contain spaces.
    fn value(&mut self) -> &'a str {
        let start = self.pos;
        let mut depth = 0i32;
        while let Some(c) = self.peek() {
            match c {
                '{' => depth += 1,
                '}' => depth -= 1,
                c if c.is_whitespace() && depth <= 0 => break,
                _ => {}
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn walk(&self, text: &str, at: usize) -> Result<Walk, ParseError> {
        text.parse::<Walk>().map_err(|e| self.err(at, e.to_string()))
    }
}

fn parse_kind(s: &str) -> Option<ElementKind> {
    let num = |p: &str| -> Option<u32> {
        if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
            None
        } else {
            p.parse().ok()
        }
    };
    match s {
        "-" => Some(ElementKind::Off),
        "." => Some(ElementKind::Empty),
        "o" => Some(ElementKind::Friend),
        "x" => Some(ElementKind::Enemy),
        _ => match s.as_bytes().first() {
            Some(b'P') => num(&s[1..]).map(ElementKind::Player),
            Some(b'I') => num(&s[1..]).map(ElementKind::Item),
            _ => None,
        },
    }
}

/// Parses a constraint list such as `x,!I3`.
pub fn parse_constraints(s: &str) -> Result<Vec<Constraint>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let (negated, body) = match part.strip_prefix('!') {
            Some(rest) => (true, rest),
            None => (false, part),
        };
        let kind = parse_kind(body).ok_or_else(|| format!("unknown element `{part}`"))?;
        out.push(Constraint { kind, negated });
    }
    check_constraints(&out)?;
    Ok(out)
}

/// Parses an element in the form `{walk}:constraints` (without `el=`).
pub fn parse_element(s: &str) -> Result<PatternElement, String> {
    let close = s.find('}').ok_or_else(|| format!("element `{s}` has no walk"))?;
    let (walk, rest) = s.split_at(close + 1);
    let walk: Walk = walk.parse().map_err(|e: crate::walk::WalkError| e.to_string())?;
    let cons = rest.strip_prefix(':').ok_or_else(|| format!("element `{s}` is missing `:`"))?;
    Ok(PatternElement::new(walk, parse_constraints(cons)?))
}

pub fn parse_feature(text: &str) -> Result<Feature, ParseError> {
    parse_feature_line(text, 1)
}

fn parse_feature_line(text: &str, line: usize) -> Result<Feature, ParseError> {
    let mut cur = Cursor { src: text, pos: 0, line };
    let mut scope = None;
    let mut mode = None;
    let mut weight = None;
    let mut rotations = None;
    let mut reflections = None;
    let mut last = None;
    let mut to = None;
    let mut from = None;
    let mut pattern = Vec::new();

    fn once<T>(slot: &mut Option<T>, v: T, cur: &Cursor, at: usize, key: &str) -> Result<(), ParseError> {
        if slot.is_some() {
            return Err(cur.err(at, format!("duplicate `{key}`")));
        }
        *slot = Some(v);
        Ok(())
    }

    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
        let at = cur.pos;
        let key = cur.word();
        if !cur.eat("=") {
            match key {
                "rel" => once(&mut scope, Scope::Relative, &cur, at, "rel/abs")?,
                "reactive" => once(&mut mode, Mode::Reactive, &cur, at, "reactive/proactive")?,
                "proactive" => once(&mut mode, Mode::Proactive, &cur, at, "reactive/proactive")?,
                "" => return Err(cur.err(at, "unexpected `=`")),
                other => return Err(cur.err(at, format!("unknown token `{other}`"))),
            }
            continue;
        }
        let vat = cur.pos;
        let value = cur.value();
        match key {
            "abs" => {
                let c: u32 = value.parse().map_err(|_| cur.err(vat, format!("bad anchor cell `{value}`")))?;
                once(&mut scope, Scope::Absolute(CellId(c)), &cur, at, "rel/abs")?;
            }
            "w" => {
                let w: f64 = value.parse().map_err(|_| cur.err(vat, format!("bad weight `{value}`")))?;
                if !w.is_finite() {
                    return Err(cur.err(vat, "weight must be finite"));
                }
                once(&mut weight, w, &cur, at, "w")?;
            }
            "rot" => {
                let r = if value == "all" {
                    Rotations::All
                } else {
                    let turns = cur.walk(value, vat)?.0;
                    if turns.is_empty() {
                        return Err(cur.err(vat, "empty rotation list"));
                    }
                    Rotations::explicit(turns)
                };
                once(&mut rotations, r, &cur, at, "rot")?;
            }
            "refl" => {
                let r = match value {
                    "yes" => true,
                    "no" => false,
                    _ => return Err(cur.err(vat, format!("refl must be yes or no, got `{value}`"))),
                };
                once(&mut reflections, r, &cur, at, "refl")?;
            }
            "last" => {
                let w = cur.walk(value, vat)?;
                once(&mut last, w, &cur, at, "last")?;
            }
            "act_to" => {
                let w = cur.walk(value, vat)?;
                once(&mut to, w, &cur, at, "act_to")?;
            }
            "act_from" => {
                let w = cur.walk(value, vat)?;
                once(&mut from, w, &cur, at, "act_from")?;
            }
            "el" => pattern.push(parse_element(value).map_err(|m| cur.err(vat, m))?),
            other => return Err(cur.err(at, format!("unknown attribute `{other}`"))),
        }
    }

    let end = text.len();
    let scope = scope.ok_or_else(|| cur.err(end, "missing `rel` or `abs=<cell>`"))?;
    let mode = mode.ok_or_else(|| cur.err(end, "missing `reactive` or `proactive`"))?;
    let to = to.ok_or_else(|| cur.err(end, "missing `act_to=`"))?;
    let (default_rot, default_refl) = match scope {
        Scope::Relative => (Rotations::All, true),
        Scope::Absolute(_) => (Rotations::Explicit(vec![Turn::ZERO]), false),
    };
    let f = Feature {
        pattern,
        action: FeatureAction { to, from },
        weight: weight.unwrap_or(1.0),
        mode,
        scope,
        rotations: rotations.unwrap_or(default_rot),
        reflections: reflections.unwrap_or(default_refl),
        last_move: last,
    };
    f.validate().map_err(|m| cur.err(end, m))?;
    Ok(f)
}

/// Parses a whole feature-set document. Blank lines and `#` comments are
/// skipped; an optional `name:` line names the set. All line errors are
/// collected before failing.
pub fn parse_feature_set(text: &str) -> Result<FeatureSet, LoadError> {
    let mut name = String::new();
    let mut features = Vec::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(n) = line.strip_prefix("name:") {
            name = n.trim().to_string();
            continue;
        }
        match parse_feature_line(raw, i + 1) {
            Ok(f) => features.push(f),
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        return Err(LoadError::Parse(errors));
    }
    if features.is_empty() {
        return Err(LoadError::Empty);
    }
    Ok(FeatureSet { name, features })
}

pub fn read_feature_set(mut reader: impl Read) -> Result<FeatureSet, LoadError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_feature_set(&text)
}

pub fn load_feature_set(path: impl AsRef<Path>) -> Result<FeatureSet, LoadError> {
    let path = path.as_ref();
    let mut fs = read_feature_set(std::fs::File::open(path)?)?;
    if fs.name.is_empty() {
        fs.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    Ok(fs)
}
