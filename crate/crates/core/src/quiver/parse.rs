//! Text format for quivers: a JSON document with arrows, potential,
//! framings, and splitting, plus a tiny expression grammar for the linear
//! forms used as weights. Form syntax: sums and differences of terms, each
//! term a rational constant, a symbol, or a rational times a symbol with
//! `*`. Rational constants are `p` or `p/q`.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;

use crate::symcore::{MultiPoly, Registry, RegistryBuilder, VarKind};

use super::{Arrow, Framing, QuiverError, QuiverWithPotential, Splitting};

/// A parsed linear form, still name-based: constant + sum of coeff * symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    pub constant: BigRational,
    pub terms: Vec<(BigRational, String)>,
}

impl LinearForm {
    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(_, s)| s.as_str())
    }

    /// Resolves symbol names against a registry, expanding eliminated
    /// symbols into their combinations.
    pub fn into_poly(&self, reg: &Arc<Registry>, context: &str) -> Result<MultiPoly, QuiverError> {
        let mut parts = vec![(self.constant.clone(), None)];
        for (c, name) in &self.terms {
            if let Some(v) = reg.lookup(name) {
                parts.push((c.clone(), Some(v)));
            } else if let Some(exp) = reg.elimination(name) {
                for (ec, ev) in exp {
                    parts.push((c * ec, Some(*ev)));
                }
            } else {
                return Err(QuiverError::UnknownSymbol {
                    name: name.clone(),
                    context: context.to_owned(),
                });
            }
        }
        let constant = parts
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(c, _)| c.clone())
            .sum();
        let linear: Vec<_> = parts
            .into_iter()
            .filter_map(|(c, v)| v.map(|v| (c, v)))
            .collect();
        Ok(MultiPoly::linear(reg, constant, &linear))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok<'a> {
    Num(&'a str),
    Ident(&'a str),
    Plus,
    Minus,
    Star,
    Slash,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok<'_>)>, (usize, String)> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push((col, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((col, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((col, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((col, Tok::Slash));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((col, Tok::Num(&src[start..i])));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((col, Tok::Ident(&src[start..i])));
            }
            other => return Err((col, format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

/// Parses a linear form. On failure returns the 1-based column of the
/// offending token and a message.
pub fn parse_linear_form(src: &str) -> Result<LinearForm, (usize, String)> {
    let toks = tokenize(src)?;
    let mut form = LinearForm {
        constant: BigRational::zero(),
        terms: Vec::new(),
    };
    let mut pos = 0;
    let end_col = src.len() + 1;
    if toks.is_empty() {
        return Err((1, "empty expression".into()));
    }
    loop {
        // Optional sign (required between terms).
        let mut sign = BigRational::one();
        if pos > 0 {
            match toks.get(pos) {
                Some((_, Tok::Plus)) => pos += 1,
                Some((_, Tok::Minus)) => {
                    sign = -sign;
                    pos += 1;
                }
                Some((col, t)) => {
                    return Err((*col, format!("expected + or - before {t:?}")))
                }
                None => break,
            }
        }
        while let Some((_, Tok::Minus)) = toks.get(pos) {
            sign = -sign;
            pos += 1;
        }
        // One term: factors joined by *, at most one symbol among them.
        let mut coeff = sign;
        let mut symbol: Option<String> = None;
        let mut expect_factor = true;
        loop {
            match toks.get(pos) {
                Some((col, Tok::Num(n))) if expect_factor => {
                    let mut num: BigRational =
                        BigRational::from_integer(n.parse().map_err(|_| {
                            (*col, format!("integer {n} out of range"))
                        })?);
                    if let Some((_, Tok::Slash)) = toks.get(pos + 1) {
                        match toks.get(pos + 2) {
                            Some((dcol, Tok::Num(d))) => {
                                let den: num_bigint::BigInt = d.parse().map_err(|_| {
                                    (*dcol, format!("integer {d} out of range"))
                                })?;
                                if den.is_zero() {
                                    return Err((*dcol, "zero denominator".into()));
                                }
                                num /= BigRational::from_integer(den);
                                pos += 2;
                            }
                            other => {
                                let col = other.map_or(end_col, |(c, _)| *c);
                                return Err((col, "expected denominator after /".into()));
                            }
                        }
                    }
                    coeff *= num;
                    pos += 1;
                    expect_factor = false;
                }
                Some((col, Tok::Ident(name))) if expect_factor => {
                    if symbol.is_some() {
                        return Err((
                            *col,
                            format!("second symbol {name:?} in one term; forms are linear"),
                        ));
                    }
                    symbol = Some((*name).to_owned());
                    pos += 1;
                    expect_factor = false;
                }
                Some((_, Tok::Star)) if !expect_factor => {
                    pos += 1;
                    expect_factor = true;
                }
                Some((col, t)) if expect_factor => {
                    return Err((*col, format!("expected a factor, found {t:?}")));
                }
                _ if expect_factor => {
                    return Err((end_col, "expected a factor, found end of input".into()));
                }
                _ => break,
            }
        }
        match symbol {
            Some(s) => form.terms.push((coeff, s)),
            None => form.constant += coeff,
        }
        if pos >= toks.len() {
            break;
        }
    }
    // Merge repeated symbols.
    let mut merged: Vec<(BigRational, String)> = Vec::new();
    for (c, s) in form.terms {
        match merged.iter_mut().find(|(_, t)| *t == s) {
            Some((mc, _)) => *mc += c,
            None => merged.push((c, s)),
        }
    }
    merged.retain(|(c, _)| !c.is_zero());
    form.terms = merged;
    Ok(form)
}

fn parse_rational(src: &str) -> Result<BigRational, (usize, String)> {
    let form = parse_linear_form(src)?;
    if !form.terms.is_empty() {
        return Err((1, format!("expected a rational constant, got {src:?}")));
    }
    Ok(form.constant)
}

#[derive(Deserialize)]
struct RawArrow {
    id: String,
    tail: String,
    head: String,
    #[serde(default)]
    weight: Option<String>,
}

#[derive(Deserialize)]
struct RawPotentialTerm {
    coeff: String,
    cycle: Vec<String>,
}

#[derive(Deserialize)]
struct RawFraming {
    node: String,
    #[serde(default, rename = "in")]
    in_weights: Vec<String>,
    #[serde(default, rename = "out")]
    out_weights: Vec<String>,
}

#[derive(Deserialize)]
struct RawSplitting {
    #[serde(default)]
    a: Vec<String>,
    #[serde(default)]
    a_star: Vec<String>,
    #[serde(default)]
    e: Vec<String>,
}

#[derive(Deserialize)]
struct RawConfig {
    #[serde(default)]
    params: Vec<String>,
    #[serde(default)]
    eliminate: HashMap<String, String>,
    nodes: Vec<String>,
    #[serde(default)]
    arrows: Vec<RawArrow>,
    #[serde(default)]
    potential: Vec<RawPotentialTerm>,
    #[serde(default)]
    framings: Vec<RawFraming>,
    #[serde(default)]
    splitting: Option<RawSplitting>,
    #[serde(default)]
    fermion_order: Option<Vec<String>>,
}

/// A quiver loaded from a config document together with its optional
/// framing.
#[derive(Debug)]
pub struct LoadedQuiver {
    pub quiver: QuiverWithPotential,
    pub framing: Option<Framing>,
}

fn form_in(ctx: &str, src: &str) -> Result<LinearForm, QuiverError> {
    parse_linear_form(src).map_err(|(col, msg)| QuiverError::Form {
        context: format!("{ctx} ({src:?})"),
        col,
        msg,
    })
}

/// Loads a quiver from its JSON description. Weight symbols are registered
/// as equivariant variables in declaration order: explicit `params` first,
/// then first mention in arrow and framing weights. Entries of `eliminate`
/// parse and print like symbols but expand to combinations of registered
/// parameters.
pub fn load_quiver(json: &str) -> Result<LoadedQuiver, QuiverError> {
    let raw: RawConfig = serde_json::from_str(json)?;

    // Pass 1: parse every form, collecting symbols in order of appearance.
    fn note(order: &mut Vec<String>, eliminate: &HashMap<String, String>, form: &LinearForm) {
        for s in form.symbols() {
            if !order.iter().any(|o| o == s) && !eliminate.contains_key(s) {
                order.push(s.to_owned());
            }
        }
    }
    let mut order: Vec<String> = Vec::new();
    for p in &raw.params {
        if !order.iter().any(|o| o == p) {
            order.push(p.clone());
        }
    }
    let mut arrow_forms = Vec::new();
    for a in &raw.arrows {
        let form = match &a.weight {
            Some(w) => form_in(&format!("arrow {:?} weight", a.id), w)?,
            None => LinearForm {
                constant: BigRational::zero(),
                terms: Vec::new(),
            },
        };
        note(&mut order, &raw.eliminate, &form);
        arrow_forms.push(form);
    }
    let mut framing_forms = Vec::new();
    for f in &raw.framings {
        let mut ins = Vec::new();
        for w in &f.in_weights {
            let form = form_in(&format!("node {:?} in-framing weight", f.node), w)?;
            note(&mut order, &raw.eliminate, &form);
            ins.push(form);
        }
        let mut outs = Vec::new();
        for w in &f.out_weights {
            let form = form_in(&format!("node {:?} out-framing weight", f.node), w)?;
            note(&mut order, &raw.eliminate, &form);
            outs.push(form);
        }
        framing_forms.push((ins, outs));
    }
    let elim_forms: HashMap<String, LinearForm> = raw
        .eliminate
        .iter()
        .map(|(name, src)| {
            let form = form_in(&format!("eliminated symbol {name:?}"), src)?;
            for s in form.symbols() {
                if !order.iter().any(|o| o == s) {
                    return Err(QuiverError::Config(format!(
                        "eliminated symbol {name:?} uses {s:?} which is not a declared parameter"
                    )));
                }
            }
            Ok((name.clone(), form))
        })
        .collect::<Result<_, _>>()?;

    // Pass 2: build the registry and resolve.
    let mut b: RegistryBuilder = Registry::builder();
    for name in &order {
        b.var(name, VarKind::Equivariant);
    }
    for (name, form) in &elim_forms {
        if order.iter().any(|o| o == name) {
            return Err(QuiverError::Config(format!(
                "eliminated symbol {name:?} is also a declared parameter"
            )));
        }
        if !form.constant.is_zero() {
            return Err(QuiverError::Config(format!(
                "eliminated symbol {name:?} must expand to a homogeneous linear form"
            )));
        }
        // Map names to the variables just registered; indices match `order`.
        let expansion = form
            .terms
            .iter()
            .map(|(c, s)| {
                let idx = order.iter().position(|o| o == s).unwrap();
                (c.clone(), crate::symcore::Var(idx as u32))
            })
            .collect();
        b.eliminated(name, expansion);
    }
    let reg = b.build();

    let node_index = |name: &str| -> Result<usize, QuiverError> {
        raw.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| QuiverError::UnknownNode(name.to_owned()))
    };

    let mut arrows = Vec::new();
    for (a, form) in raw.arrows.iter().zip(&arrow_forms) {
        arrows.push(Arrow {
            id: a.id.clone(),
            tail: node_index(&a.tail)?,
            head: node_index(&a.head)?,
            weight: form.into_poly(&reg, &format!("arrow {:?}", a.id))?,
        });
    }
    let arrow_index = |id: &str| -> Result<usize, QuiverError> {
        arrows
            .iter()
            .position(|a| a.id == id)
            .ok_or_else(|| QuiverError::UnknownArrow(id.to_owned()))
    };

    let mut potential = Vec::new();
    for t in &raw.potential {
        let coeff = parse_rational(&t.coeff).map_err(|(col, msg)| QuiverError::Form {
            context: format!("potential coefficient {:?}", t.coeff),
            col,
            msg,
        })?;
        let cycle = t
            .cycle
            .iter()
            .map(|id| arrow_index(id))
            .collect::<Result<Vec<_>, _>>()?;
        potential.push((coeff, cycle));
    }

    let splitting = match &raw.splitting {
        Some(s) => {
            if s.a.len() != s.a_star.len() {
                return Err(QuiverError::BadSplitting(format!(
                    "a and a_star have different lengths ({} vs {})",
                    s.a.len(),
                    s.a_star.len()
                )));
            }
            let pairs = s
                .a
                .iter()
                .zip(&s.a_star)
                .map(|(x, y)| Ok((arrow_index(x)?, arrow_index(y)?)))
                .collect::<Result<Vec<_>, QuiverError>>()?;
            let loops = s
                .e
                .iter()
                .map(|id| arrow_index(id))
                .collect::<Result<Vec<_>, _>>()?;
            Some(Splitting { pairs, loops })
        }
        None => None,
    };

    let fermion_order = match &raw.fermion_order {
        Some(names) => {
            let mut order: Vec<usize> = names
                .iter()
                .map(|n| node_index(n))
                .collect::<Result<_, _>>()?;
            // Nodes omitted from the override keep their natural place after
            // the listed ones.
            for i in 0..raw.nodes.len() {
                if !order.contains(&i) {
                    order.push(i);
                }
            }
            Some(order)
        }
        None => None,
    };

    let mut framing = None;
    if !raw.framings.is_empty() {
        let mut f = Framing::empty(raw.nodes.len());
        for (rf, (ins, outs)) in raw.framings.iter().zip(&framing_forms) {
            let i = node_index(&rf.node)?;
            let ctx = format!("node {:?} framing", rf.node);
            f.in_weights[i] = ins
                .iter()
                .map(|form| form.into_poly(&reg, &ctx))
                .collect::<Result<_, _>>()?;
            f.out_weights[i] = outs
                .iter()
                .map(|form| form.into_poly(&reg, &ctx))
                .collect::<Result<_, _>>()?;
        }
        framing = Some(f);
    }

    let quiver = QuiverWithPotential::new(
        reg,
        raw.nodes.clone(),
        arrows,
        potential,
        splitting,
        fermion_order,
    )?;
    Ok(LoadedQuiver { quiver, framing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::rat;

    #[test]
    fn linear_form_grammar() {
        let f = parse_linear_form("2*hbar - t + 1/2").unwrap();
        assert_eq!(f.constant, rat(1, 2));
        assert_eq!(
            f.terms,
            vec![(rat(2, 1), "hbar".into()), (rat(-1, 1), "t".into())]
        );
        let f = parse_linear_form("-hbar").unwrap();
        assert_eq!(f.terms, vec![(rat(-1, 1), "hbar".into())]);
        let f = parse_linear_form("hbar*3/2").unwrap();
        assert_eq!(f.terms, vec![(rat(3, 2), "hbar".into())]);
        let f = parse_linear_form("0").unwrap();
        assert!(f.terms.is_empty());
        assert_eq!(f.constant, rat(0, 1));
        // Cancelling terms vanish.
        let f = parse_linear_form("t - t").unwrap();
        assert!(f.terms.is_empty());
    }

    #[test]
    fn linear_form_errors_carry_columns() {
        let (col, msg) = parse_linear_form("hbar * t").unwrap_err();
        assert_eq!(col, 8);
        assert!(msg.contains("linear"));
        let (col, _) = parse_linear_form("2 +").unwrap_err();
        assert_eq!(col, 4);
        let (col, _) = parse_linear_form("1/0").unwrap_err();
        assert_eq!(col, 3);
        let (col, _) = parse_linear_form("a ^ b").unwrap_err();
        assert_eq!(col, 3);
    }

    #[test]
    fn loads_tripled_jordan_config() {
        let json = r#"{
            "params": ["hbar1", "hbar2"],
            "eliminate": {"hbar3": "-hbar1 - hbar2"},
            "nodes": ["1"],
            "arrows": [
                {"id": "X", "tail": "1", "head": "1", "weight": "-hbar1"},
                {"id": "Y", "tail": "1", "head": "1", "weight": "-hbar2"},
                {"id": "Z", "tail": "1", "head": "1", "weight": "-hbar3"}
            ],
            "potential": [
                {"coeff": "1", "cycle": ["Y", "X", "Z"]},
                {"coeff": "-1", "cycle": ["X", "Y", "Z"]}
            ],
            "splitting": {"a": ["X"], "a_star": ["Y"], "e": ["Z"]}
        }"#;
        let loaded = load_quiver(json).unwrap();
        let q = &loaded.quiver;
        assert_eq!(q.node_count(), 1);
        assert!(q.is_symmetric());
        assert!(!q.node_parity(0));
        // -hbar3 expands to hbar1 + hbar2.
        let z = q.arrow_index("Z").unwrap();
        assert_eq!(format!("{}", q.arrows()[z].weight), "hbar1 + hbar2");
        assert_eq!(q.potential().len(), 2);
    }

    #[test]
    fn config_errors() {
        let json = r#"{"nodes": ["1"], "arrows": [{"id": "a", "tail": "1", "head": "2"}]}"#;
        assert!(matches!(
            load_quiver(json).unwrap_err(),
            QuiverError::UnknownNode(n) if n == "2"
        ));
        let json = r#"{"nodes": ["1"], "arrows": [{"id": "a", "tail": "1", "head": "1", "weight": "t t"}]}"#;
        match load_quiver(json).unwrap_err() {
            QuiverError::Form { col, .. } => assert_eq!(col, 3),
            other => panic!("unexpected error {other:?}"),
        }
        // JSON syntax errors surface the parser's line/column report.
        let err = load_quiver("{\n  \"nodes\": [,]\n}").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 2"), "{msg}");
    }
}
