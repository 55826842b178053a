use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_rational::BigRational;

/// What role a symbol plays. The kind never affects arithmetic; it exists so
/// that consumers (parsers, printers, validation) can reject symbols in
/// positions where they make no sense, e.g. a Chern root inside an arrow
/// weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum VarKind {
    /// Torus weights: hbar, hbar_1..3, t, t_a, framing weights.
    Equivariant,
    /// Spectral parameters: u, v, z_i.
    Spectral,
    /// Chern roots x_alpha of tautological bundles.
    ChernRoot,
    /// Formal Novikov variables tracking curve degrees.
    Novikov,
    /// Anything else: shift parameter z, the sigma placeholder in bond
    /// factors, the a of psi-series.
    Auxiliary,
}

/// Index of a variable inside its registry. Cheap to copy; meaningless
/// without the registry that issued it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub(crate) u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug)]
struct VarInfo {
    name: String,
    kind: VarKind,
}

static NEXT_REGISTRY_ID: AtomicU64 = AtomicU64::new(1);

/// An immutable, ordered table of variables. The registration order fixes
/// the monomial order (graded lex), so every computation registers its full
/// variable set up front and the canonical form of every expression in that
/// computation is reproducible.
///
/// A registry may also carry eliminated symbols: names that parse and print
/// like variables but expand to a linear combination of real variables at
/// construction time. This is how the relation hbar1 + hbar2 + hbar3 = 0 is
/// imposed: hbar3 is registered as the combination -hbar1 - hbar2 and never
/// appears in stored polynomials.
#[derive(Debug)]
pub struct Registry {
    id: u64,
    vars: Vec<VarInfo>,
    index: HashMap<String, Var>,
    eliminated: HashMap<String, Vec<(BigRational, Var)>>,
}

impl Registry {
    pub fn builder() -> RegistryBuilder {
        RegistryBuilder {
            vars: Vec::new(),
            index: HashMap::new(),
            eliminated: HashMap::new(),
        }
    }

    pub(crate) fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.vars[v.index()].name
    }

    pub fn kind(&self, v: Var) -> VarKind {
        self.vars[v.index()].kind
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    /// The expansion of an eliminated symbol, if `name` is one.
    pub fn elimination(&self, name: &str) -> Option<&[(BigRational, Var)]> {
        self.eliminated.get(name).map(|v| v.as_slice())
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.vars.len() as u32).map(Var)
    }
}

pub struct RegistryBuilder {
    vars: Vec<VarInfo>,
    index: HashMap<String, Var>,
    eliminated: HashMap<String, Vec<(BigRational, Var)>>,
}

impl RegistryBuilder {
    /// Registers a variable and returns its handle. Panics on duplicate
    /// names: a duplicate is always a programming error in the calling
    /// context, never user input.
    pub fn var(&mut self, name: &str, kind: VarKind) -> Var {
        assert!(
            !self.index.contains_key(name) && !self.eliminated.contains_key(name),
            "duplicate variable name {name:?}"
        );
        let v = Var(self.vars.len() as u32);
        self.vars.push(VarInfo {
            name: name.to_owned(),
            kind,
        });
        self.index.insert(name.to_owned(), v);
        v
    }

    /// Registers `name` as an alias for a linear combination of existing
    /// variables. The symbol parses and prints, but stored polynomials only
    /// ever contain its expansion.
    pub fn eliminated(&mut self, name: &str, expansion: Vec<(BigRational, Var)>) {
        assert!(
            !self.index.contains_key(name) && !self.eliminated.contains_key(name),
            "duplicate variable name {name:?}"
        );
        for (_, v) in &expansion {
            assert!(v.index() < self.vars.len(), "expansion uses unknown variable");
        }
        self.eliminated.insert(name.to_owned(), expansion);
    }

    pub fn build(self) -> Arc<Registry> {
        Arc::new(Registry {
            id: NEXT_REGISTRY_ID.fetch_add(1, Ordering::Relaxed),
            vars: self.vars,
            index: self.index,
            eliminated: self.eliminated,
        })
    }
}

/// Renders a symbol name as LaTeX: known greek stems become commands and a
/// trailing digit run becomes a subscript, so "hbar2" is "\hbar_{2}" and
/// "x13" is "x_{13}".
pub fn latex_name(name: &str) -> String {
    let split = name.len() - name.chars().rev().take_while(|c| c.is_ascii_digit()).count();
    let (stem, digits) = name.split_at(split);
    let stem_tex = match stem {
        "hbar" => r"\hbar".to_owned(),
        "sigma" => r"\sigma".to_owned(),
        "eps" | "epsilon" => r"\varepsilon".to_owned(),
        "lambda" => r"\lambda".to_owned(),
        other => other.to_owned(),
    };
    if digits.is_empty() {
        stem_tex
    } else {
        format!("{stem_tex}_{{{digits}}}")
    }
}
