//! Finite cell models of σ-finite measure spaces, sub-σ-algebras given as
//! partitions into blocks, cellwise functions, and conditional expectation.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellKind {
    /// An atom of the underlying measure.
    #[serde(alias = "atom")]
    SigmaAtom,
    /// A discretization piece of the non-atomic part.
    Fragment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: String,
    pub mass: f64,
    pub kind: CellKind,
    /// Position of the cell in its parameter domain, when it has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<f64>,
}

/// A finite collection of cells with strictly positive masses.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    cells: Vec<Cell>,
    masses: Vec<f64>,
    index: HashMap<String, usize>,
}

impl MeasureSpace {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            bail!(Argument, "a measure space needs at least one cell");
        }
        let mut index = HashMap::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            if !(c.mass.is_finite() && c.mass > 0.0) {
                bail!(Argument, "cell {:?} has non-positive or non-finite mass {}", c.id, c.mass);
            }
            if index.insert(c.id.clone(), i).is_some() {
                bail!(Argument, "duplicate cell id {:?}", c.id);
            }
        }
        let masses = cells.iter().map(|c| c.mass).collect();
        Ok(Self { cells, masses, index })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        match self.index.get(id) {
            Some(&i) => Ok(i),
            None => bail!(Argument, "unknown cell id {id:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    /// An atom of the sub-σ-algebra.
    AAtom,
    /// A block of fragments inside the non-atomic part.
    Carrier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub label: String,
    pub kind: BlockKind,
    pub cells: Vec<usize>,
    pub mass: f64,
}

/// Block description by cell ids, as found in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub label: String,
    pub cells: Vec<String>,
    pub kind: BlockKind,
}

/// A sub-σ-algebra represented by a partition of the cells.
#[derive(Debug, Clone)]
pub struct SubAlgebra {
    space: Arc<MeasureSpace>,
    blocks: Vec<Block>,
    block_of: Vec<usize>,
}

impl SubAlgebra {
    pub fn new(space: Arc<MeasureSpace>, specs: &[BlockSpec]) -> Result<Self> {
        let mut blocks = Vec::with_capacity(specs.len());
        for spec in specs {
            let cells = spec.cells.iter().map(|id| space.index_of(id)).collect::<Result<Vec<_>>>()?;
            blocks.push((spec.label.clone(), spec.kind, cells));
        }
        Self::from_indices(space, blocks)
    }

    /// Builds the partition from cell indices.
    pub fn from_indices(space: Arc<MeasureSpace>, blocks: Vec<(String, BlockKind, Vec<usize>)>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; space.len()];
        let mut labels = HashSet::new();
        let mut out = Vec::with_capacity(blocks.len());
        for (b, (label, kind, cells)) in blocks.into_iter().enumerate() {
            if cells.is_empty() {
                bail!(Argument, "block {label:?} is empty");
            }
            if !labels.insert(label.clone()) {
                bail!(Argument, "duplicate block label {label:?}");
            }
            for &c in &cells {
                if c >= space.len() {
                    bail!(Argument, "block {label:?} references cell index {c} out of range");
                }
                if block_of[c] != usize::MAX {
                    bail!(Argument, "cell {:?} belongs to more than one block", space.cells[c].id);
                }
                if kind == BlockKind::Carrier && space.cells[c].kind != CellKind::Fragment {
                    bail!(Argument, "carrier block {label:?} contains the atom {:?}", space.cells[c].id);
                }
                block_of[c] = b;
            }
            let mass = cells.iter().map(|&c| space.masses[c]).sum();
            out.push(Block { label, kind, cells, mass });
        }
        if let Some(c) = block_of.iter().position(|&b| b == usize::MAX) {
            bail!(Argument, "cell {:?} is not covered by any block", space.cells[c].id);
        }
        Ok(Self { space, blocks: out, block_of })
    }

    /// The full σ-algebra: every cell is its own block.
    pub fn full(space: Arc<MeasureSpace>) -> Self {
        let blocks = space
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let kind = match c.kind {
                    CellKind::SigmaAtom => BlockKind::AAtom,
                    CellKind::Fragment => BlockKind::Carrier,
                };
                (c.id.clone(), kind, vec![i])
            })
            .collect();
        Self::from_indices(space, blocks).expect("singleton partition is valid")
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_of(&self, cell: usize) -> usize {
        self.block_of[cell]
    }

    pub fn block_masses(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.mass).collect()
    }

    /// Per-block averages of a real cellwise array.
    pub fn block_means(&self, values: &[f64]) -> Vec<f64> {
        let m = &self.space.masses;
        self.blocks
            .iter()
            .map(|b| {
                let first = values[b.cells[0]];
                if b.cells.iter().all(|&c| values[c] == first) {
                    return first;
                }
                b.cells.iter().map(|&c| values[c] * m[c]).sum::<f64>() / b.mass
            })
            .collect()
    }

    /// Expands per-block values back to cells.
    pub fn spread<T: Copy>(&self, per_block: &[T]) -> Vec<T> {
        self.block_of.iter().map(|&b| per_block[b]).collect()
    }

    /// Real conditional expectation of a cellwise array.
    pub fn average(&self, values: &[f64]) -> Vec<f64> {
        self.spread(&self.block_means(values))
    }

    pub fn has_carrier(&self) -> bool {
        self.blocks.iter().any(|b| b.kind == BlockKind::Carrier)
    }

    pub fn to_specs(&self) -> Vec<BlockSpec> {
        self.blocks
            .iter()
            .map(|b| BlockSpec {
                label: b.label.clone(),
                cells: b.cells.iter().map(|&c| self.space.cells[c].id.clone()).collect(),
                kind: b.kind,
            })
            .collect()
    }
}

/// A complex value on every cell of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurableFn {
    space: Arc<MeasureSpace>,
    values: Vec<Complex64>,
}

fn same_space(a: &Arc<MeasureSpace>, b: &Arc<MeasureSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl MeasurableFn {
    pub fn new(space: Arc<MeasureSpace>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.len() {
            bail!(Argument, "function has {} values but the space has {} cells", values.len(), space.len());
        }
        if let Some(v) = values.iter().find(|v| !(v.re.is_finite() && v.im.is_finite())) {
            bail!(Domain, "non-finite function value {v}");
        }
        Ok(Self { space, values })
    }

    pub fn real(space: Arc<MeasureSpace>, values: Vec<f64>) -> Result<Self> {
        Self::new(space, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(space: Arc<MeasureSpace>, c: Complex64) -> Self {
        let values = vec![c; space.len()];
        Self { space, values }
    }

    pub fn zero(space: Arc<MeasureSpace>) -> Self {
        Self::constant(space, Complex64::new(0.0, 0.0))
    }

    /// Indicator of a set of cell indices.
    pub fn indicator(space: Arc<MeasureSpace>, cells: &[usize]) -> Self {
        let mut f = Self::zero(space);
        for &c in cells {
            f.values[c] = Complex64::new(1.0, 0.0);
        }
        f
    }

    /// Evaluates an expression with `w` bound to the cell coordinate and
    /// `n` to the one-based cell position.
    pub fn from_expr(space: Arc<MeasureSpace>, expr: &Expr) -> Result<Self> {
        let values = space
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| Complex64::new(expr.eval((i + 1) as f64, c.coord.unwrap_or(f64::NAN)), 0.0))
            .collect();
        Self::new(space, values)
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.space.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn conj(&self) -> Self {
        Self { space: self.space.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { space: self.space.clone(), values: self.values.iter().map(|&v| v * c).collect() }
    }

    fn zip(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            bail!(Argument, "functions live on different spaces");
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Ok(Self { space: self.space.clone(), values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    /// Whether the function is constant on every block up to `tol`.
    pub fn is_block_constant(&self, alg: &SubAlgebra, tol: f64) -> bool {
        alg.blocks.iter().all(|b| {
            let first = self.values[b.cells[0]];
            b.cells.iter().all(|&c| (self.values[c] - first).norm() <= tol)
        })
    }

    pub fn check_space(&self, alg: &SubAlgebra) -> Result<()> {
        if !same_space(&self.space, &alg.space) {
            bail!(Argument, "function and sub-algebra live on different spaces");
        }
        Ok(())
    }
}

/// Σ f(c)·mass(c) over all cells.
pub fn integrate(f: &MeasurableFn) -> Complex64 {
    f.values.iter().zip(&f.space.masses).map(|(v, m)| v * m).sum()
}

/// Σ f(c)·mass(c) over the named cells.
pub fn integrate_over(f: &MeasurableFn, ids: &[&str]) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for id in ids {
        let c = f.space.index_of(id)?;
        acc += f.values[c] * f.space.masses[c];
    }
    Ok(acc)
}

pub fn integrate_cells(f: &MeasurableFn, cells: &[usize]) -> Complex64 {
    cells.iter().map(|&c| f.values[c] * f.space.masses[c]).sum()
}

/// Conditional expectation: the mass-weighted block average on every block.
/// A block on which `f` is already constant keeps its value exactly.
pub fn cond_exp(f: &MeasurableFn, alg: &SubAlgebra) -> Result<MeasurableFn> {
    f.check_space(alg)?;
    let per_block: Vec<Complex64> = alg
        .blocks
        .iter()
        .map(|b| {
            let first = f.values[b.cells[0]];
            if b.cells.iter().all(|&c| f.values[c] == first) {
                first
            } else {
                integrate_cells(f, &b.cells) / b.mass
            }
        })
        .collect();
    Ok(MeasurableFn { space: f.space.clone(), values: alg.spread(&per_block) })
}

/// `[-1, 1]` with `dμ = dw/2` cut into `n_cells` equal fragments, with the
/// blocks pairing the cell at `w` with the cell at `-w`.
pub fn build_symmetric_space(n_cells: usize) -> Result<(Arc<MeasureSpace>, SubAlgebra)> {
    if n_cells < 2 || !n_cells.is_multiple_of(2) {
        bail!(Argument, "symmetric space needs an even number of cells >= 2, got {n_cells}");
    }
    let h = 2.0 / n_cells as f64;
    let cells = (0..n_cells)
        .map(|i| Cell {
            id: format!("w{i}"),
            mass: 1.0 / n_cells as f64,
            kind: CellKind::Fragment,
            coord: Some(-1.0 + (i as f64 + 0.5) * h),
        })
        .collect();
    let space = Arc::new(MeasureSpace::new(cells)?);
    let blocks = (0..n_cells / 2)
        .map(|i| (format!("pair{i}"), BlockKind::Carrier, vec![i, n_cells - 1 - i]))
        .collect();
    let alg = SubAlgebra::from_indices(space.clone(), blocks)?;
    Ok((space, alg))
}

/// `[0, 1]` with Lebesgue measure cut into `n·cells_per_interval` cells;
/// blocks are the orbits of the shift by `1/n` modulo 1.
pub fn build_rotation_space(n: usize, cells_per_interval: usize) -> Result<(Arc<MeasureSpace>, SubAlgebra)> {
    if n < 2 || cells_per_interval < 1 {
        bail!(Argument, "rotation space needs n >= 2 and cells_per_interval >= 1, got {n}, {cells_per_interval}");
    }
    let total = n * cells_per_interval;
    let cells = (0..total)
        .map(|j| Cell {
            id: format!("x{j}"),
            mass: 1.0 / total as f64,
            kind: CellKind::Fragment,
            coord: Some((j as f64 + 0.5) / total as f64),
        })
        .collect();
    let space = Arc::new(MeasureSpace::new(cells)?);
    let blocks = (0..cells_per_interval)
        .map(|r| (format!("orbit{r}"), BlockKind::Carrier, (0..n).map(|k| r + k * cells_per_interval).collect()))
        .collect();
    let alg = SubAlgebra::from_indices(space.clone(), blocks)?;
    Ok((space, alg))
}

/// Purely atomic space with the full σ-algebra; atom `i` gets id `A{i+1}`.
pub fn build_atomic_space(masses: &[f64]) -> Result<(Arc<MeasureSpace>, SubAlgebra)> {
    let cells = masses
        .iter()
        .enumerate()
        .map(|(i, &mass)| Cell { id: format!("A{}", i + 1), mass, kind: CellKind::SigmaAtom, coord: None })
        .collect();
    let space = Arc::new(MeasureSpace::new(cells)?);
    let alg = SubAlgebra::full(space.clone());
    Ok((space, alg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub id: String,
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<f64>,
}

/// Explicit description of a space and its partition. Omitting `blocks`
/// selects the full σ-algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default)]
    pub atoms: Vec<CellSpec>,
    #[serde(default)]
    pub fragments: Vec<CellSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockSpec>>,
}

impl SpaceSpec {
    pub fn build(&self) -> Result<(Arc<MeasureSpace>, SubAlgebra)> {
        let cell = |c: &CellSpec, kind| Cell { id: c.id.clone(), mass: c.mass, kind, coord: c.coord };
        let cells = self
            .atoms
            .iter()
            .map(|c| cell(c, CellKind::SigmaAtom))
            .chain(self.fragments.iter().map(|c| cell(c, CellKind::Fragment)))
            .collect();
        let space = Arc::new(MeasureSpace::new(cells)?);
        let alg = match &self.blocks {
            Some(b) => SubAlgebra::new(space.clone(), b)?,
            None => SubAlgebra::full(space.clone()),
        };
        Ok((space, alg))
    }

    pub fn from_parts(alg: &SubAlgebra) -> Self {
        let mut spec = Self { atoms: vec![], fragments: vec![], blocks: Some(alg.to_specs()) };
        for c in alg.space.cells() {
            let cs = CellSpec { id: c.id.clone(), mass: c.mass, coord: c.coord };
            match c.kind {
                CellKind::SigmaAtom => spec.atoms.push(cs),
                CellKind::Fragment => spec.fragments.push(cs),
            }
        }
        spec
    }
}

/// An infinite family of 𝒜-atoms `A_1, A_2, ...` given in closed form and
/// truncated at `n_max` for numerical work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolicAtomSequence {
    pub mass_fn: Expr,
    pub value_fn: Expr,
    pub n_max: usize,
}

impl SymbolicAtomSequence {
    pub fn new(mass_fn: Expr, value_fn: Expr, n_max: usize) -> Result<Self> {
        let s = Self { mass_fn, value_fn, n_max };
        s.validate()?;
        Ok(s)
    }

    pub fn parse(mass_fn: &str, value_fn: &str, n_max: usize) -> Result<Self> {
        Self::new(Expr::parse(mass_fn)?, Expr::parse(value_fn)?, n_max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            bail!(Argument, "n_max must be at least 1");
        }
        for n in 1..=self.n_max {
            let m = self.mass_fn.at(n);
            if !(m.is_finite() && m > 0.0) {
                bail!(Argument, "mass_fn({n}) = {m} is not a positive finite number");
            }
            let v = self.value_fn.at(n);
            if !v.is_finite() {
                bail!(Argument, "value_fn({n}) = {v} is not finite");
            }
        }
        Ok(())
    }

    /// Masses `μ(A_1), ..., μ(A_{n_max})`.
    pub fn masses(&self) -> Vec<f64> {
        (1..=self.n_max).map(|n| self.mass_fn.at(n)).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        (1..=self.n_max).map(|n| self.value_fn.at(n)).collect()
    }

    pub fn with_n_max(&self, n_max: usize) -> Result<Self> {
        Self::new(self.mass_fn.clone(), self.value_fn.clone(), n_max)
    }

    /// The first `depth` atoms as a finite atomic space with the full
    /// σ-algebra, together with the weight.
    pub fn to_finite(&self, depth: usize) -> Result<(SubAlgebra, MeasurableFn)> {
        let depth = depth.min(self.n_max);
        let masses: Vec<f64> = (1..=depth).map(|n| self.mass_fn.at(n)).collect();
        let (space, alg) = build_atomic_space(&masses)?;
        let u = MeasurableFn::real(space, (1..=depth).map(|n| self.value_fn.at(n)).collect())?;
        Ok((alg, u))
    }
}
