//! The distribution and distortion mini-language.
//!
//! ```text
//! normal(0,1)   t(4)   uniform(0,1)   exp(1.5)
//! empirical:<path.csv>   piecewise:<path.json>
//! counterexample_x(n,a,b)   counterexample_y(n,a,b)
//!
//! os(n=10,gamma=0.5)   os(n=10,rule=kth_smallest,k=2)
//! mix(n=10; 0.3@0.25, 0.7@0.75)   record(n=3,k=2)
//! ```
//!
//! Family templates drop `n`: `os(gamma=0.5)`, `mix(0.3@0.25, 0.7@0.75)`,
//! `record(k=2)`, or a bare `os` whose γ comes from elsewhere.

use std::fmt;
use stochord::asymptotics::counterexample_pair;
use stochord::IndexSequence;
use stochord::{Distortion, Distribution, EmpiricalSample, FamilyTemplate, PiecewiseCdf};

#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub input: String,
    /// Byte offset the caret points at.
    pub pos: usize,
    pub msg: String,
}

impl SpecError {
    fn new(input: &str, pos: usize, msg: impl Into<String>) -> Self {
        SpecError { input: input.to_string(), pos: pos.min(input.len()), msg: msg.into() }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let col = self.input[..self.pos].chars().count();
        write!(f, "{}\n  {}\n  {}^", self.msg, self.input, " ".repeat(col))
    }
}

impl std::error::Error for SpecError {}

type Parsed<T> = Result<T, SpecError>;

/// A parsed law, kept symbolic so it can be printed back in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub enum LawSpec {
    Normal { mu: f64, sigma: f64 },
    StudentT { nu: f64 },
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    Empirical(String),
    Piecewise(String),
    CounterexampleX { n: u64, a: f64, b: f64 },
    CounterexampleY { n: u64, a: f64, b: f64 },
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawSpec::Normal { mu, sigma } => write!(f, "normal({mu},{sigma})"),
            LawSpec::StudentT { nu } => write!(f, "t({nu})"),
            LawSpec::Uniform { a, b } => write!(f, "uniform({a},{b})"),
            LawSpec::Exponential { rate } => write!(f, "exp({rate})"),
            LawSpec::Empirical(p) => write!(f, "empirical:{p}"),
            LawSpec::Piecewise(p) => write!(f, "piecewise:{p}"),
            LawSpec::CounterexampleX { n, a, b } => write!(f, "counterexample_x({n},{a},{b})"),
            LawSpec::CounterexampleY { n, a, b } => write!(f, "counterexample_y({n},{a},{b})"),
        }
    }
}

impl LawSpec {
    /// Builds the law. File-backed specs are read here.
    pub fn build(&self) -> stochord::Result<Distribution> {
        use stochord::Error;
        let read = |p: &str| std::fs::read_to_string(p).map_err(|e| Error::Argument(format!("cannot read {p}: {e}")));
        match self {
            LawSpec::Normal { mu, sigma } => Distribution::normal(*mu, *sigma),
            LawSpec::StudentT { nu } => Distribution::student_t(*nu),
            LawSpec::Uniform { a, b } => Distribution::uniform(*a, *b),
            LawSpec::Exponential { rate } => Distribution::exponential(*rate),
            LawSpec::Empirical(p) => Ok(Distribution::Empirical(EmpiricalSample::from_csv_text(&read(p)?)?)),
            LawSpec::Piecewise(p) => Ok(Distribution::piecewise(PiecewiseCdf::from_json(&read(p)?)?)),
            LawSpec::CounterexampleX { n, a, b } => Ok(counterexample_pair(*n, *a, *b)?.0),
            LawSpec::CounterexampleY { n, a, b } => Ok(counterexample_pair(*n, *a, *b)?.1),
        }
    }
}

/// Either side of the grammar.
#[derive(Debug, Clone, PartialEq)]
pub enum Spec {
    Law(LawSpec),
    Distortion(Distortion),
}

pub fn parse_spec(s: &str) -> Parsed<Spec> {
    let t = s.trim_start();
    let name_end = t.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(t.len());
    match &t[..name_end] {
        "os" | "mix" | "record" => parse_distortion(s).map(Spec::Distortion),
        _ => parse_law(s).map(Spec::Law),
    }
}

/// One comma-separated item with its byte offset in the original input.
#[derive(Debug, Clone)]
struct Item<'a> {
    text: &'a str,
    pos: usize,
}

struct Call<'a> {
    name: &'a str,
    name_pos: usize,
    close_pos: usize,
    /// Items, grouped by `;`.
    groups: Vec<Vec<Item<'a>>>,
}

fn split_call(input: &str) -> Parsed<Call<'_>> {
    let start = input.len() - input.trim_start().len();
    let rest = &input[start..];
    let name_len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
    if name_len == 0 {
        return Err(SpecError::new(input, start, "expected a family name"));
    }
    let name = &rest[..name_len];
    let mut i = start + name_len;
    while input[i..].starts_with(char::is_whitespace) {
        i += input[i..].chars().next().unwrap().len_utf8();
    }
    if !input[i..].starts_with('(') {
        return Err(SpecError::new(input, i, format!("expected '(' after '{name}'")));
    }
    let open = i;
    let trimmed_end = input.trim_end().len();
    if !input[..trimmed_end].ends_with(')') {
        return Err(SpecError::new(input, trimmed_end, "missing ')'"));
    }
    let close = trimmed_end - 1;
    if let Some(off) = input[open + 1..close].find(['(', ')']) {
        return Err(SpecError::new(input, open + 1 + off, "unexpected parenthesis"));
    }
    let mut groups = Vec::new();
    let body_start = open + 1;
    let body = &input[body_start..close];
    if !body.trim().is_empty() {
        let mut gpos = body_start;
        for g in body.split(';') {
            let mut items = Vec::new();
            let mut ipos = gpos;
            for it in g.split(',') {
                let lead = it.len() - it.trim_start().len();
                items.push(Item { text: it.trim(), pos: ipos + lead });
                ipos += it.len() + 1;
            }
            groups.push(items);
            gpos += g.len() + 1;
        }
    }
    Ok(Call { name, name_pos: start, close_pos: close, groups })
}

fn num(input: &str, it: &Item) -> Parsed<f64> {
    if it.text.is_empty() {
        return Err(SpecError::new(input, it.pos, "empty parameter"));
    }
    match it.text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(SpecError::new(input, it.pos, format!("non-numeric parameter '{}'", it.text))),
    }
}

fn int(input: &str, it: &Item) -> Parsed<u64> {
    it.text
        .parse::<u64>()
        .map_err(|_| SpecError::new(input, it.pos, format!("expected a non-negative integer, got '{}'", it.text)))
}

fn positional<'a>(input: &str, c: &'a Call, arity: usize) -> Parsed<&'a [Item<'a>]> {
    if c.groups.len() > 1 {
        let pos = c.groups[0].last().map(|i| i.pos + i.text.len()).unwrap_or(c.close_pos);
        return Err(SpecError::new(input, pos, format!("'{}' takes comma-separated parameters", c.name)));
    }
    let items: &[Item] = c.groups.first().map(|g| g.as_slice()).unwrap_or(&[]);
    if items.len() != arity {
        let pos = if items.len() > arity { items[arity].pos } else { c.close_pos };
        let plural = if arity == 1 { "" } else { "s" };
        return Err(SpecError::new(
            input,
            pos,
            format!("arity mismatch: '{}' takes {arity} parameter{plural}, got {}", c.name, items.len()),
        ));
    }
    Ok(items)
}

const LAWS: &str = "normal, t, uniform, exp, empirical:, piecewise:, counterexample_x, counterexample_y";

pub fn parse_law(input: &str) -> Parsed<LawSpec> {
    let t = input.trim();
    for (prefix, file) in [("empirical:", true), ("piecewise:", false)] {
        if let Some(path) = t.strip_prefix(prefix) {
            if path.is_empty() {
                return Err(SpecError::new(input, input.len(), "missing file path"));
            }
            let p = path.to_string();
            return Ok(if file { LawSpec::Empirical(p) } else { LawSpec::Piecewise(p) });
        }
    }
    let c = split_call(input)?;
    let law = match c.name {
        "normal" => {
            let p = positional(input, &c, 2)?;
            LawSpec::Normal { mu: num(input, &p[0])?, sigma: num(input, &p[1])? }
        }
        "t" => LawSpec::StudentT { nu: num(input, &positional(input, &c, 1)?[0])? },
        "uniform" => {
            let p = positional(input, &c, 2)?;
            LawSpec::Uniform { a: num(input, &p[0])?, b: num(input, &p[1])? }
        }
        "exp" => LawSpec::Exponential { rate: num(input, &positional(input, &c, 1)?[0])? },
        "counterexample_x" | "counterexample_y" => {
            let p = positional(input, &c, 3)?;
            let (n, a, b) = (int(input, &p[0])?, num(input, &p[1])?, num(input, &p[2])?);
            if c.name.ends_with('x') {
                LawSpec::CounterexampleX { n, a, b }
            } else {
                LawSpec::CounterexampleY { n, a, b }
            }
        }
        other => return Err(SpecError::new(input, c.name_pos, format!("unknown family '{other}' (expected one of {LAWS})"))),
    };
    Ok(law)
}

/// key=value items, each key at most once and from `allowed`.
fn keyvals<'a>(input: &str, items: &[Item<'a>], allowed: &[&str]) -> Parsed<Vec<(&'a str, Item<'a>)>> {
    let mut out: Vec<(&str, Item)> = Vec::new();
    for it in items {
        let Some(eq) = it.text.find('=') else {
            return Err(SpecError::new(input, it.pos, format!("expected key=value, got '{}'", it.text)));
        };
        let key = it.text[..eq].trim();
        if !allowed.contains(&key) {
            return Err(SpecError::new(input, it.pos, format!("unknown key '{key}' (expected one of {})", allowed.join(", "))));
        }
        if out.iter().any(|(k, _)| *k == key) {
            return Err(SpecError::new(input, it.pos, format!("duplicate key '{key}'")));
        }
        let raw = &it.text[eq + 1..];
        let lead = raw.len() - raw.trim_start().len();
        out.push((key, Item { text: raw.trim(), pos: it.pos + eq + 1 + lead }));
    }
    Ok(out)
}

fn get<'a, 'b>(kv: &'b [(&'a str, Item<'a>)], key: &str) -> Option<&'b Item<'a>> {
    kv.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
}

fn need<'a, 'b>(input: &str, c: &Call, kv: &'b [(&'a str, Item<'a>)], key: &str) -> Parsed<&'b Item<'a>> {
    get(kv, key).ok_or_else(|| SpecError::new(input, c.close_pos, format!("'{}' needs {key}=...", c.name)))
}

fn order_sequence(input: &str, c: &Call, kv: &[(&str, Item)]) -> Parsed<IndexSequence> {
    let err = |it: &Item, e: stochord::Error| SpecError::new(input, it.pos, e.to_string());
    match (get(kv, "gamma"), get(kv, "rule")) {
        (Some(g), None) => {
            if let Some(k) = get(kv, "k") {
                return Err(SpecError::new(input, k.pos, "k needs rule=kth_smallest or rule=kth_largest"));
            }
            Ok(IndexSequence::constant(num(input, g)?))
        }
        (None, Some(r)) => {
            let k_item = need(input, c, kv, "k")?;
            let k = int(input, k_item)?;
            match r.text {
                "kth_smallest" => IndexSequence::kth_smallest(k).map_err(|e| err(k_item, e)),
                "kth_largest" => IndexSequence::kth_largest(k).map_err(|e| err(k_item, e)),
                other => Err(SpecError::new(
                    input,
                    r.pos,
                    format!("unknown rule '{other}' (expected kth_smallest or kth_largest)"),
                )),
            }
        }
        (Some(_), Some(r)) => Err(SpecError::new(input, r.pos, "give either gamma or rule, not both")),
        (None, None) => Err(SpecError::new(input, c.close_pos, "'os' needs gamma=... or rule=...,k=...")),
    }
}

fn mixture_terms(input: &str, items: &[Item]) -> Parsed<(Vec<f64>, Vec<f64>)> {
    let mut alphas = Vec::new();
    let mut gammas = Vec::new();
    for it in items {
        let Some(at) = it.text.find('@') else {
            return Err(SpecError::new(input, it.pos, format!("expected weight@gamma, got '{}'", it.text)));
        };
        let a = &it.text[..at];
        let g = &it.text[at + 1..];
        alphas.push(num(input, &Item { text: a.trim(), pos: it.pos })?);
        let lead = g.len() - g.trim_start().len();
        gammas.push(num(input, &Item { text: g.trim(), pos: it.pos + at + 1 + lead })?);
    }
    Ok((alphas, gammas))
}

fn lib_err(input: &str, pos: usize) -> impl Fn(stochord::Error) -> SpecError + '_ {
    move |e| SpecError::new(input, pos, e.to_string())
}

const DISTORTIONS: &str = "os, mix, record";

pub fn parse_distortion(input: &str) -> Parsed<Distortion> {
    let c = split_call(input)?;
    fn single<'a>(input: &str, c: &Call<'a>) -> Parsed<Vec<Item<'a>>> {
        if c.groups.len() > 1 {
            let semi = c.groups[1].first().map(|i| i.pos).unwrap_or(c.close_pos);
            return Err(SpecError::new(input, semi.saturating_sub(1), format!("unexpected ';' in '{}'", c.name)));
        }
        Ok(c.groups.first().cloned().unwrap_or_default())
    }
    match c.name {
        "os" => {
            let items = single(input, &c)?;
            let kv = keyvals(input, &items, &["n", "gamma", "rule", "k"])?;
            let n_item = need(input, &c, &kv, "n")?;
            let n = int(input, n_item)?;
            let seq = order_sequence(input, &c, &kv)?;
            Distortion::order_stat(n, seq.gamma_n(n)).map_err(lib_err(input, n_item.pos))
        }
        "record" => {
            let items = single(input, &c)?;
            let kv = keyvals(input, &items, &["n", "k"])?;
            let n = int(input, need(input, &c, &kv, "n")?)?;
            let k_item = need(input, &c, &kv, "k")?;
            Distortion::record(n, int(input, k_item)?).map_err(lib_err(input, k_item.pos))
        }
        "mix" => {
            if c.groups.len() != 2 {
                return Err(SpecError::new(input, c.close_pos, "'mix' expects n=...; weight@gamma, ..."));
            }
            let kv = keyvals(input, &c.groups[0], &["n"])?;
            let n = int(input, need(input, &c, &kv, "n")?)?;
            let (alphas, gammas) = mixture_terms(input, &c.groups[1])?;
            Distortion::mixture(n, alphas, gammas).map_err(lib_err(input, c.groups[1][0].pos))
        }
        other => Err(SpecError::new(input, c.name_pos, format!("unknown family '{other}' (expected one of {DISTORTIONS})"))),
    }
}

/// Parses a family template. A bare `os` takes its limit γ from `gamma`.
pub fn parse_family(input: &str, gamma: Option<f64>) -> Parsed<FamilyTemplate> {
    if input.trim() == "os" {
        return match gamma {
            Some(g) if (0.0..=1.0).contains(&g) => Ok(FamilyTemplate::order_stat(g)),
            Some(g) => Err(SpecError::new(input, 0, format!("gamma {g} outside [0,1]"))),
            None => Err(SpecError::new(input, input.len(), "bare 'os' needs --gamma")),
        };
    }
    let c = split_call(input)?;
    let reject_n = |kv: &[(&str, Item)]| -> Parsed<()> {
        match get(kv, "n") {
            Some(it) => Err(SpecError::new(input, it.pos, "a family takes n from --ns, drop n=")),
            None => Ok(()),
        }
    };
    let check_gamma = |g: f64, pos: usize| -> Parsed<()> {
        if (0.0..=1.0).contains(&g) {
            Ok(())
        } else {
            Err(SpecError::new(input, pos, format!("gamma {g} outside [0,1]")))
        }
    };
    match c.name {
        "os" => {
            let items = c.groups.concat();
            let kv = keyvals(input, &items, &["n", "gamma", "rule", "k"])?;
            reject_n(&kv)?;
            let seq = order_sequence(input, &c, &kv)?;
            if let Some(g) = get(&kv, "gamma") {
                check_gamma(seq.gamma, g.pos)?;
            }
            Ok(FamilyTemplate::OrderStat(seq))
        }
        "record" => {
            let items = c.groups.concat();
            let kv = keyvals(input, &items, &["n", "k"])?;
            reject_n(&kv)?;
            let k_item = need(input, &c, &kv, "k")?;
            let k = int(input, k_item)?;
            if k == 0 {
                return Err(SpecError::new(input, k_item.pos, "k must be at least 1"));
            }
            Ok(FamilyTemplate::Record { k })
        }
        "mix" => {
            let terms = match c.groups.len() {
                1 => &c.groups[0],
                2 => {
                    reject_n(&keyvals(input, &c.groups[0], &["n"])?)?;
                    &c.groups[1]
                }
                _ => return Err(SpecError::new(input, c.close_pos, "'mix' expects weight@gamma, ...")),
            };
            let (alphas, gammas) = mixture_terms(input, terms)?;
            // validate weights and points once through a concrete member
            Distortion::mixture(2, alphas.clone(), gammas.clone()).map_err(lib_err(input, terms[0].pos))?;
            Ok(FamilyTemplate::mixture(alphas, gammas))
        }
        other => Err(SpecError::new(input, c.name_pos, format!("unknown family '{other}' (expected one of {DISTORTIONS})"))),
    }
}

/// Index lists: `2:100` (inclusive), `2:100:5` (with step) or `2,3,5,10`.
pub fn parse_ns(input: &str) -> Parsed<Vec<u64>> {
    let t = input.trim();
    let lead = input.len() - input.trim_start().len();
    let item = |text: &str, pos: usize| -> Parsed<u64> {
        let n = text.trim().parse::<u64>().map_err(|_| {
            SpecError::new(input, pos, format!("expected a positive integer, got '{}'", text.trim()))
        })?;
        if n == 0 {
            return Err(SpecError::new(input, pos, "n must be at least 1"));
        }
        Ok(n)
    };
    if t.is_empty() {
        return Err(SpecError::new(input, 0, "empty index list"));
    }
    let mut out = Vec::new();
    if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() > 3 {
            return Err(SpecError::new(input, lead, "expected start:end or start:end:step"));
        }
        let mut pos = lead;
        let mut vals = Vec::new();
        for p in &parts {
            vals.push(item(p, pos)?);
            pos += p.len() + 1;
        }
        let (a, b) = (vals[0], vals[1]);
        let step = vals.get(2).copied().unwrap_or(1);
        if b < a {
            return Err(SpecError::new(input, lead + parts[0].len() + 1, format!("end {b} below start {a}")));
        }
        out.extend((a..=b).step_by(step as usize));
    } else {
        let mut pos = lead;
        for p in t.split(',') {
            out.push(item(p, pos)?);
            pos += p.len() + 1;
        }
        if out.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SpecError::new(input, lead, "indices must be strictly increasing"));
        }
    }
    Ok(out)
}
