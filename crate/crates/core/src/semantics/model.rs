use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::crisp::AtomCell;
use super::value::TruthValue;

/// Index of a domain element.
pub type Element = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("domain must be nonempty")]
    EmptyDomain,
    #[error("duplicate domain element `{0}`")]
    DuplicateElement(String),
    #[error("unknown domain element `{0}`")]
    UnknownElement(String),
    #[error("predicate {name} has no value at ({})", tuple.join(","))]
    MissingValue { name: String, tuple: Vec<String> },
    #[error("predicate {name} given arity {found}, expected {expected}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("similarity ~{base} is not reflexive at {element}")]
    NotReflexive { base: String, element: String },
    #[error("similarity ~{base} is not symmetric at ({left},{right})")]
    NotSymmetric {
        base: String,
        left: String,
        right: String,
    },
    #[error("similarity ~{base} has no value at ({left},{right})")]
    MissingSimilarity {
        base: String,
        left: String,
        right: String,
    },
    #[error("conflicting values for {0}")]
    Conflict(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Values of one predicate on every tuple of domain elements, in mixed-radix
/// order (first argument most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub arity: usize,
    pub values: Vec<TruthValue>,
}

/// A finite model: domain, constant denotations, predicate tables and
/// reflexive, symmetric similarity tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    domain: Vec<String>,
    constants: BTreeMap<String, Element>,
    preds: BTreeMap<String, Table>,
    sims: BTreeMap<String, Vec<TruthValue>>,
}

pub(crate) fn tuple_index(n: usize, tuple: &[Element]) -> usize {
    tuple.iter().fold(0, |acc, &d| acc * n + d)
}

pub(crate) fn index_tuple(n: usize, arity: usize, mut index: usize) -> Vec<Element> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

impl Model {
    /// Assembles a model from complete tables, checking the similarity
    /// constraints.
    pub fn from_tables(
        domain: Vec<String>,
        constants: BTreeMap<String, Element>,
        preds: BTreeMap<String, Table>,
        sims: BTreeMap<String, Vec<TruthValue>>,
    ) -> Result<Model, ModelError> {
        let n = domain.len();
        if n == 0 {
            return Err(ModelError::EmptyDomain);
        }
        for (i, d) in domain.iter().enumerate() {
            if domain[..i].contains(d) {
                return Err(ModelError::DuplicateElement(d.clone()));
            }
        }
        for &e in constants.values() {
            if e >= n {
                return Err(ModelError::UnknownElement(e.to_string()));
            }
        }
        for (name, table) in &preds {
            if table.values.len() != n.pow(table.arity as u32) {
                return Err(ModelError::MissingValue {
                    name: name.clone(),
                    tuple: vec![],
                });
            }
        }
        for (base, table) in &sims {
            if table.len() != n * n {
                return Err(ModelError::MissingSimilarity {
                    base: base.clone(),
                    left: domain[0].clone(),
                    right: domain[0].clone(),
                });
            }
            for d in 0..n {
                if table[d * n + d] != TruthValue::ONE {
                    return Err(ModelError::NotReflexive {
                        base: base.clone(),
                        element: domain[d].clone(),
                    });
                }
                for e in 0..d {
                    if table[d * n + e] != table[e * n + d] {
                        return Err(ModelError::NotSymmetric {
                            base: base.clone(),
                            left: domain[e].clone(),
                            right: domain[d].clone(),
                        });
                    }
                }
            }
        }
        Ok(Model {
            domain,
            constants,
            preds,
            sims,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn element_index(&self, name: &str) -> Option<Element> {
        self.domain.iter().position(|d| d == name)
    }

    pub fn constant(&self, name: &str) -> Option<Element> {
        self.constants.get(name).copied()
    }

    pub fn constants(&self) -> &BTreeMap<String, Element> {
        &self.constants
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, &Table)> {
        self.preds.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn predicate(&self, name: &str) -> Option<&Table> {
        self.preds.get(name)
    }

    pub fn sim_bases(&self) -> impl Iterator<Item = &str> {
        self.sims.keys().map(String::as_str)
    }

    pub fn has_similarity(&self) -> bool {
        !self.sims.is_empty()
    }

    pub fn pred_value(&self, name: &str, tuple: &[Element]) -> Option<TruthValue> {
        let table = self.preds.get(name)?;
        if table.arity != tuple.len() || tuple.iter().any(|&d| d >= self.domain.len()) {
            return None;
        }
        Some(table.values[tuple_index(self.domain.len(), tuple)])
    }

    pub fn sim_value(&self, base: &str, left: Element, right: Element) -> Option<TruthValue> {
        let n = self.domain.len();
        if left >= n || right >= n {
            return None;
        }
        self.sims.get(base).map(|t| t[left * n + right])
    }

    /// Every atom value in the model (predicate cells and similarity cells).
    pub fn atom_values(&self) -> impl Iterator<Item = TruthValue> + '_ {
        self.preds
            .values()
            .flat_map(|t| t.values.iter().copied())
            .chain(self.sims.values().flat_map(|t| t.iter().copied()))
    }

    pub(crate) fn tables_mut(
        &mut self,
    ) -> (
        &mut BTreeMap<String, Table>,
        &mut BTreeMap<String, Vec<TruthValue>>,
    ) {
        (&mut self.preds, &mut self.sims)
    }

    /// Adds a similarity table; the caller guarantees reflexivity and symmetry.
    pub(crate) fn with_sim_table(mut self, base: String, table: Vec<TruthValue>) -> Model {
        self.sims.insert(base, table);
        self
    }

    /// Overwrites one cell; similarity cells are written symmetrically.
    pub(crate) fn set_cell(&mut self, cell: &AtomCell, v: TruthValue) {
        let n = self.domain.len();
        match cell {
            AtomCell::Pred { name, tuple } => {
                let table = self.preds.get_mut(name).expect("cell of a known predicate");
                table.values[tuple_index(n, tuple)] = v;
            }
            AtomCell::Sim { base, left, right } => {
                let table = self.sims.get_mut(base).expect("cell of a known relation");
                table[left * n + right] = v;
                table[right * n + left] = v;
            }
        }
    }

    /// Renames elements by a permutation: element `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[Element]) -> Model {
        let n = self.domain.len();
        assert_eq!(perm.len(), n);
        let mut domain = vec![String::new(); n];
        for (i, name) in self.domain.iter().enumerate() {
            domain[perm[i]] = name.clone();
        }
        let constants = self
            .constants
            .iter()
            .map(|(c, &e)| (c.clone(), perm[e]))
            .collect();
        let preds = self
            .preds
            .iter()
            .map(|(name, t)| {
                let mut values = t.values.clone();
                for (idx, v) in t.values.iter().enumerate() {
                    let tuple: Vec<Element> =
                        index_tuple(n, t.arity, idx).into_iter().map(|d| perm[d]).collect();
                    values[tuple_index(n, &tuple)] = *v;
                }
                (name.clone(), Table { arity: t.arity, values })
            })
            .collect();
        let sims = self
            .sims
            .iter()
            .map(|(base, t)| {
                let mut values = t.clone();
                for d in 0..n {
                    for e in 0..n {
                        values[perm[d] * n + perm[e]] = t[d * n + e];
                    }
                }
                (base.clone(), values)
            })
            .collect();
        Model {
            domain,
            constants,
            preds,
            sims,
        }
    }
}

/// Incremental construction from named entries, as read from a model file.
#[derive(Debug, Default)]
pub struct ModelBuilder {
    domain: Vec<String>,
    constants: BTreeMap<String, Element>,
    preds: BTreeMap<String, (usize, BTreeMap<Vec<Element>, TruthValue>)>,
    sims: BTreeMap<String, BTreeMap<(Element, Element), TruthValue>>,
}

impl ModelBuilder {
    pub fn new<I, S>(domain: I) -> ModelBuilder
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ModelBuilder {
            domain: domain.into_iter().map(Into::into).collect(),
            ..ModelBuilder::default()
        }
    }

    fn element(&self, name: &str) -> Result<Element, ModelError> {
        self.domain
            .iter()
            .position(|d| d == name)
            .ok_or_else(|| ModelError::UnknownElement(name.to_string()))
    }

    pub fn constant(mut self, name: &str, element: &str) -> Result<ModelBuilder, ModelError> {
        let e = self.element(element)?;
        if let Some(prev) = self.constants.insert(name.to_string(), e) {
            if prev != e {
                return Err(ModelError::Conflict(format!("const {name}")));
            }
        }
        Ok(self)
    }

    pub fn pred(
        mut self,
        name: &str,
        tuple: &[&str],
        value: TruthValue,
    ) -> Result<ModelBuilder, ModelError> {
        let tuple = tuple
            .iter()
            .map(|d| self.element(d))
            .collect::<Result<Vec<_>, _>>()?;
        let entry = self
            .preds
            .entry(name.to_string())
            .or_insert_with(|| (tuple.len(), BTreeMap::new()));
        if entry.0 != tuple.len() {
            return Err(ModelError::Arity {
                name: name.to_string(),
                expected: entry.0,
                found: tuple.len(),
            });
        }
        if let Some(prev) = entry.1.insert(tuple, value) {
            if prev != value {
                return Err(ModelError::Conflict(format!("pred {name}")));
            }
        }
        Ok(self)
    }

    /// Sets `left ~base right`; the mirrored entry is filled in automatically.
    pub fn sim(
        mut self,
        base: &str,
        left: &str,
        right: &str,
        value: TruthValue,
    ) -> Result<ModelBuilder, ModelError> {
        let (l, r) = (self.element(left)?, self.element(right)?);
        if l == r && value != TruthValue::ONE {
            return Err(ModelError::NotReflexive {
                base: base.to_string(),
                element: left.to_string(),
            });
        }
        let table = self.sims.entry(base.to_string()).or_default();
        for key in [(l, r), (r, l)] {
            if let Some(prev) = table.insert(key, value) {
                if prev != value {
                    return Err(ModelError::NotSymmetric {
                        base: base.to_string(),
                        left: left.to_string(),
                        right: right.to_string(),
                    });
                }
            }
        }
        Ok(self)
    }

    /// Declares a similarity relation with no entries yet (diagonal only).
    pub fn sim_base(mut self, base: &str) -> ModelBuilder {
        self.sims.entry(base.to_string()).or_default();
        self
    }

    pub fn build(self) -> Result<Model, ModelError> {
        let n = self.domain.len();
        if n == 0 {
            return Err(ModelError::EmptyDomain);
        }
        let mut preds = BTreeMap::new();
        for (name, (arity, entries)) in self.preds {
            let size = n.pow(arity as u32);
            let mut values = Vec::with_capacity(size);
            for idx in 0..size {
                let tuple = index_tuple(n, arity, idx);
                match entries.get(&tuple) {
                    Some(v) => values.push(*v),
                    None => {
                        return Err(ModelError::MissingValue {
                            name,
                            tuple: tuple.iter().map(|&d| self.domain[d].clone()).collect(),
                        })
                    }
                }
            }
            preds.insert(name, Table { arity, values });
        }
        let mut sims = BTreeMap::new();
        for (base, entries) in self.sims {
            let mut table = vec![TruthValue::ONE; n * n];
            for d in 0..n {
                for e in 0..n {
                    if d == e {
                        continue;
                    }
                    match entries.get(&(d, e)) {
                        Some(v) => table[d * n + e] = *v,
                        None => {
                            return Err(ModelError::MissingSimilarity {
                                base,
                                left: self.domain[d].clone(),
                                right: self.domain[e].clone(),
                            })
                        }
                    }
                }
            }
            sims.insert(base, table);
        }
        Model::from_tables(self.domain, self.constants, preds, sims)
    }
}

impl fmt::Display for Model {
    /// Line-oriented model file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.domain.len();
        writeln!(f, "domain {}", self.domain.join(" "))?;
        for (c, &e) in &self.constants {
            writeln!(f, "const {c} = {}", self.domain[e])?;
        }
        for (name, table) in &self.preds {
            for (idx, v) in table.values.iter().enumerate() {
                let tuple: Vec<&str> = index_tuple(n, table.arity, idx)
                    .into_iter()
                    .map(|d| self.domain[d].as_str())
                    .collect();
                writeln!(f, "pred {name}({}) = {v}", tuple.join(","))?;
            }
        }
        for (base, table) in &self.sims {
            for d in 0..n {
                for e in d + 1..n {
                    writeln!(
                        f,
                        "sim {base}({},{}) = {}",
                        self.domain[d],
                        self.domain[e],
                        table[d * n + e]
                    )?;
                }
            }
            if n == 1 {
                // Keeps the relation declared when it has no off-diagonal cells.
                writeln!(f, "sim {base}({0},{0}) = 1", self.domain[0])?;
            }
        }
        Ok(())
    }
}

fn format_err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Format {
        line,
        message: message.into(),
    }
}

/// Splits `P(d1,d2)` into the name and argument list.
fn split_application(text: &str, line: usize) -> Result<(&str, Vec<&str>), ModelError> {
    let open = text
        .find('(')
        .ok_or_else(|| format_err(line, format!("expected `(` in `{text}`")))?;
    if !text.ends_with(')') {
        return Err(format_err(line, format!("expected `)` in `{text}`")));
    }
    let name = text[..open].trim();
    let inner = text[open + 1..text.len() - 1].trim();
    let args = if inner.is_empty() {
        vec![]
    } else {
        inner.split(',').map(str::trim).collect()
    };
    Ok((name, args))
}

impl std::str::FromStr for Model {
    type Err = ModelError;

    fn from_str(text: &str) -> Result<Model, ModelError> {
        let mut builder: Option<ModelBuilder> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            if keyword == "domain" {
                if builder.is_some() {
                    return Err(format_err(line_no, "domain declared twice"));
                }
                builder = Some(ModelBuilder::new(rest.split_whitespace()));
                continue;
            }
            let b = builder
                .take()
                .ok_or_else(|| format_err(line_no, "`domain` must come first"))?;
            let (lhs, rhs) = rest
                .split_once('=')
                .ok_or_else(|| format_err(line_no, "expected `=`"))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            let wrap = |e: ModelError| format_err(line_no, e.to_string());
            builder = Some(match keyword {
                "const" => b.constant(lhs, rhs).map_err(wrap)?,
                "pred" => {
                    let value: TruthValue =
                        rhs.parse().map_err(|e: super::ValueError| format_err(line_no, e.to_string()))?;
                    let (name, args) = if lhs.contains('(') {
                        split_application(lhs, line_no)?
                    } else {
                        (lhs, vec![])
                    };
                    b.pred(name, &args, value).map_err(wrap)?
                }
                "sim" => {
                    let value: TruthValue =
                        rhs.parse().map_err(|e: super::ValueError| format_err(line_no, e.to_string()))?;
                    let (base, args) = split_application(lhs, line_no)?;
                    if args.len() != 2 {
                        return Err(format_err(line_no, "similarity takes two elements"));
                    }
                    b.sim(base, args[0], args[1], value).map_err(wrap)?
                }
                other => return Err(format_err(line_no, format!("unknown keyword `{other}`"))),
            });
        }
        builder.ok_or(ModelError::EmptyDomain)?.build()
    }
}
