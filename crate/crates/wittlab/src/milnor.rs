//! Mod-l class calculus over iterated Laurent towers: Kummer class vectors,
//! cup-product rank tests, iterated tame residues for mod-2 symbols, and a
//! finite-group bar-resolution oracle for cup products of characters.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, FieldElement, Layer, Scalar, TowerMonomial};
use crate::pfister::PfisterSpec;

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Kummer classes and cup rank
// ---------------------------------------------------------------------------

/// The class of a nonzero tower monomial in `K^x / l`: its uniformizer
/// valuations mod `l` followed by the discrete-log class of the residue unit.
#[derive(Clone, Debug, PartialEq)]
pub struct KummerClass {
    pub ell: u64,
    pub vector: Vec<u64>,
    pub ambient: FieldDescriptor,
}

/// Computes the class vector of a monomial; requires `l | q - 1` so that the
/// residue field contains the needed roots of unity.
pub fn kummer_class(f: &FieldDescriptor, a: &FieldElement, ell: u64) -> Result<KummerClass> {
    if !is_prime_u64(ell) {
        return Err(Error::invalid(format!("{ell} is not prime")));
    }
    if f.layer() != Layer::Tower || !f.is_finite_base() {
        return Err(Error::unsupported(
            "kummer classes are computed over towers with finite base",
        ));
    }
    let ctx = f.fq_ctx().expect("finite base");
    if (ctx.q() - 1) % ell != 0 {
        return Err(Error::unsupported(format!(
            "the base field F{} has no primitive {ell}-th roots of unity",
            ctx.q()
        )));
    }
    f.check_element(a)?;
    let m = a.as_tower().expect("tower element");
    let mut vector: Vec<u64> = m
        .exps
        .iter()
        .map(|&e| e.rem_euclid(ell as i64) as u64)
        .collect();
    let unit = match &m.scalar {
        Scalar::Fq(u) => u.clone(),
        _ => unreachable!("finite base"),
    };
    vector.push(ctx.dlog(&unit)? % ell);
    Ok(KummerClass {
        ell,
        vector,
        ambient: f.clone(),
    })
}

/// Verdict of the rank criterion for a cup product of degree-1 classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CupRank {
    /// Full rank: independent degree-1 classes have nonvanishing product.
    Nonzero,
    /// Dependent at odd `l`: alternation kills the product.
    Zero,
    /// Dependent at `l = 2`: the rank criterion is one-sided; defer to the
    /// bar-resolution oracle.
    Indeterminate,
}

fn rank_mod(ell: u64, vectors: &[Vec<u64>]) -> usize {
    let mut rows: Vec<Vec<u64>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x % ell).collect())
        .collect();
    let width = rows.first().map(Vec::len).unwrap_or(0);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inv(ell, rows[rank][col]);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % ell;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let c = rows[r][col];
                for j in 0..width {
                    rows[r][j] = (rows[r][j] + (ell - c) * rows[rank][j]) % ell;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_inv(ell: u64, a: u64) -> u64 {
    // ell prime, a nonzero mod ell
    let mut acc = 1u64;
    let mut b = a % ell;
    let mut e = ell - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % ell;
        }
        b = b * b % ell;
        e >>= 1;
    }
    acc
}

/// Rank criterion on character vectors over `F_l`.
pub fn cup_rank(ell: u64, vectors: &[Vec<u64>]) -> Result<CupRank> {
    if !is_prime_u64(ell) {
        return Err(Error::invalid(format!("{ell} is not prime")));
    }
    if vectors.is_empty() {
        return Err(Error::invalid("cup rank of an empty family"));
    }
    let len = vectors[0].len();
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::invalid("class vectors of different lengths"));
    }
    let rank = rank_mod(ell, vectors);
    if rank == vectors.len() {
        Ok(CupRank::Nonzero)
    } else if ell != 2 {
        Ok(CupRank::Zero)
    } else {
        Ok(CupRank::Indeterminate)
    }
}

/// Rank criterion on Kummer classes sharing one ambient tower and one `l`.
pub fn cup_rank_classes(classes: &[KummerClass]) -> Result<CupRank> {
    if classes.is_empty() {
        return Err(Error::invalid("cup rank of an empty family"));
    }
    let ell = classes[0].ell;
    let ambient = &classes[0].ambient;
    for c in classes {
        if c.ell != ell || &c.ambient != ambient {
            return Err(Error::invalid("classes live in different groups"));
        }
    }
    let vectors: Vec<Vec<u64>> = classes.iter().map(|c| c.vector.clone()).collect();
    cup_rank(ell, &vectors)
}

// ---------------------------------------------------------------------------
// Mod-2 Milnor symbols and tame residues
// ---------------------------------------------------------------------------

/// The mod-2 symbol `{a1, ..., an}` over a tower (or its finite base).
#[derive(Clone, Debug, PartialEq)]
pub struct MilnorSymbol {
    ambient: FieldDescriptor,
    entries: Vec<FieldElement>,
}

impl MilnorSymbol {
    pub fn new(ambient: FieldDescriptor, entries: Vec<FieldElement>) -> Result<MilnorSymbol> {
        if entries.is_empty() {
            return Err(Error::invalid("symbols need at least one entry"));
        }
        if !ambient.is_finite_base() || ambient.characteristic() == 2 {
            return Err(Error::unsupported(
                "mod-2 symbols are computed over towers with finite odd base",
            ));
        }
        if ambient.layer() == Layer::Function {
            return Err(Error::unsupported("symbols over rational function layers"));
        }
        for e in &entries {
            ambient.check_element(e)?;
            if e.is_zero() {
                return Err(Error::invalid("symbol entries must be nonzero"));
            }
        }
        Ok(MilnorSymbol { ambient, entries })
    }

    pub fn ambient(&self) -> &FieldDescriptor {
        &self.ambient
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn arity(&self) -> usize {
        self.entries.len()
    }

    pub fn display(&self) -> String {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| self.ambient.display_element(e))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// A square-class-canonical symbol entry at one tower level: valuation bits
/// per uniformizer and the unit-part square class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct CanonEntry {
    exps: Vec<u8>,
    nonsquare: bool,
}

impl CanonEntry {
    fn is_trivial(&self) -> bool {
        !self.nonsquare && self.exps.iter().all(|&b| b == 0)
    }

    fn strip_outer(&self) -> (CanonEntry, bool) {
        let d = self.exps.len();
        (
            CanonEntry {
                exps: self.exps[..d - 1].to_vec(),
                nonsquare: self.nonsquare,
            },
            self.exps[d - 1] == 1,
        )
    }
}

/// A formal F2-sum of mod-2 symbols with canonical entries; the working
/// representation for iterated residues (the tame residue of a single
/// symbol is a sum in general).
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSum {
    ambient: FieldDescriptor,
    arity: usize,
    terms: BTreeSet<Vec<CanonEntry>>,
}

fn canon_entry(f: &FieldDescriptor, m: &TowerMonomial) -> CanonEntry {
    let exps: Vec<u8> = m.exps.iter().map(|&e| (e.rem_euclid(2)) as u8).collect();
    let nonsquare = match &m.scalar {
        Scalar::Fq(u) => !u.is_square(),
        _ => unreachable!("finite base"),
    };
    let _ = f;
    CanonEntry { exps, nonsquare }
}

impl SymbolSum {
    pub fn zero(ambient: FieldDescriptor, arity: usize) -> SymbolSum {
        SymbolSum {
            ambient,
            arity,
            terms: BTreeSet::new(),
        }
    }

    pub fn from_symbol(s: &MilnorSymbol) -> SymbolSum {
        let mut entries = Vec::with_capacity(s.arity());
        for e in &s.entries {
            let m = match e {
                FieldElement::Tower(m) => m.clone(),
                FieldElement::Fq(u) => TowerMonomial {
                    scalar: Scalar::Fq(u.clone()),
                    exps: Vec::new(),
                },
                _ => unreachable!("validated at construction"),
            };
            let c = canon_entry(&s.ambient, &m);
            if c.is_trivial() {
                // a square entry kills the symbol
                return SymbolSum::zero(s.ambient.clone(), s.arity());
            }
            entries.push(c);
        }
        entries.sort();
        let mut sum = SymbolSum::zero(s.ambient.clone(), s.arity());
        sum.toggle(entries);
        sum
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn toggle(&mut self, term: Vec<CanonEntry>) {
        if !self.terms.remove(&term) {
            self.terms.insert(term);
        }
    }

    /// One residue step along the outermost uniformizer: returns the
    /// unramified part (same arity) and the tame part (arity down one), both
    /// over the smaller tower.
    pub fn residue_step(&self) -> Result<(SymbolSum, SymbolSum)> {
        let depth = self.ambient.tower_depth();
        if depth == 0 {
            return Err(Error::invalid("residues need at least one uniformizer"));
        }
        let inner = self.ambient.drop_outer_uniformizer();
        let ctx = self.ambient.fq_ctx().expect("finite base");
        let minus_one_square = ctx.one().neg().is_square();
        let minus_one_entry = CanonEntry {
            exps: vec![0; depth - 1],
            nonsquare: true,
        };
        let mut unram = SymbolSum::zero(inner.clone(), self.arity);
        let mut tame = SymbolSum::zero(inner.clone(), self.arity.saturating_sub(1));
        for term in &self.terms {
            // per slot: the unit-part class (if nonzero) and/or the
            // uniformizer choice (if the entry is ramified)
            let slots: Vec<(Option<CanonEntry>, bool)> = term
                .iter()
                .map(|e| {
                    let (eps, w) = e.strip_outer();
                    (if eps.is_trivial() { None } else { Some(eps) }, w)
                })
                .collect();
            let free: Vec<usize> = slots
                .iter()
                .enumerate()
                .filter(|(_, (eps, w))| eps.is_some() && *w)
                .map(|(i, _)| i)
                .collect();
            for mask in 0u64..(1u64 << free.len()) {
                let mut take_t = vec![false; slots.len()];
                let mut ok = true;
                for (i, (eps, w)) in slots.iter().enumerate() {
                    match (eps, w) {
                        (None, true) => take_t[i] = true,
                        (Some(_), false) => {}
                        (Some(_), true) => {
                            let fi = free.iter().position(|&f| f == i).unwrap();
                            take_t[i] = (mask >> fi) & 1 == 1;
                        }
                        (None, false) => {
                            ok = false; // trivial entry: term vanishes
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let k = take_t.iter().filter(|&&b| b).count();
                let mut entries: Vec<CanonEntry> = slots
                    .iter()
                    .zip(&take_t)
                    .filter(|(_, &t)| !t)
                    .map(|((eps, _), _)| eps.clone().expect("non-T slot has a class"))
                    .collect();
                if k == 0 {
                    entries.sort();
                    unram.toggle(entries);
                } else {
                    // collapse repeated uniformizer choices: t.t = (-1).t
                    if k >= 2 && minus_one_square {
                        continue; // the extra -1 entries are squares
                    }
                    for _ in 0..k - 1 {
                        entries.push(minus_one_entry.clone());
                    }
                    entries.sort();
                    tame.toggle(entries);
                }
            }
        }
        Ok((unram, tame))
    }

    /// Exact zero test by iterating residues down to the finite base, where
    /// symbols of arity >= 2 vanish and arity <= 1 classes reduce to square
    /// classes and parities.
    pub fn is_zero(&self) -> Result<bool> {
        if self.ambient.tower_depth() == 0 {
            if self.arity >= 2 {
                return Ok(true);
            }
            return Ok(self.terms.is_empty());
        }
        let (unram, tame) = self.residue_step()?;
        Ok(unram.is_zero()? && tame.is_zero()?)
    }

    /// Human-readable terms, entries shown by square-class representatives.
    pub fn display_terms(&self) -> Vec<String> {
        let depth = self.ambient.tower_depth();
        let nonsquare_rep = self
            .ambient
            .fq_ctx()
            .and_then(|c| c.least_nonsquare().ok());
        self.terms
            .iter()
            .map(|term| {
                let parts: Vec<String> = term
                    .iter()
                    .map(|e| {
                        let scalar = if e.nonsquare {
                            Scalar::Fq(nonsquare_rep.clone().expect("odd base"))
                        } else {
                            Scalar::Fq(self.ambient.fq_ctx().expect("finite").one())
                        };
                        let m = TowerMonomial {
                            scalar,
                            exps: e.exps.iter().map(|&b| b as i64).collect(),
                        };
                        if depth == 0 {
                            format!("{}", m.scalar)
                        } else {
                            self.ambient.display_element(&FieldElement::Tower(m))
                        }
                    })
                    .collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect()
    }
}

/// Tame residue and specialization of a single symbol along the outermost
/// uniformizer. The unramified part is the symbol of unit parts; the tame
/// part is a formal sum in general.
pub fn symbol_residue(s: &MilnorSymbol) -> Result<(SymbolSum, MilnorSymbol)> {
    let depth = s.ambient.tower_depth();
    if depth == 0 {
        return Err(Error::invalid("residues need at least one uniformizer"));
    }
    let inner = s.ambient.drop_outer_uniformizer();
    let unram_entries: Vec<FieldElement> = s
        .entries
        .iter()
        .map(|e| {
            let m = e.as_tower().expect("tower entries");
            let stripped = TowerMonomial {
                scalar: m.scalar.clone(),
                exps: m.exps[..depth - 1].to_vec(),
            };
            if inner.tower_depth() == 0 {
                inner.base_descriptor().scalar_element(stripped.scalar)
            } else {
                FieldElement::Tower(stripped)
            }
        })
        .collect();
    let unram = MilnorSymbol::new(inner.clone(), unram_entries)?;
    let (_, tame) = SymbolSum::from_symbol(s).residue_step()?;
    Ok((tame, unram))
}

/// Whether `{a1, ..., an}` vanishes in mod-2 Milnor K-theory of the tower.
pub fn symbol_is_zero_mod2(s: &MilnorSymbol) -> Result<bool> {
    SymbolSum::from_symbol(s).is_zero()
}

/// The symbol attached to a Pfister form: `<<a1, ..., an>>` maps to
/// `{-a1, ..., -an}` (with the "+" expansion convention, the signs are
/// inserted here and not in the form constructor).
pub fn e_n_map(spec: &PfisterSpec) -> Result<MilnorSymbol> {
    let f = spec.ambient();
    let entries: Vec<FieldElement> = spec.generators().iter().map(|g| f.neg(g)).collect();
    MilnorSymbol::new(f.clone(), entries)
}

// ---------------------------------------------------------------------------
// vcd detection
// ---------------------------------------------------------------------------

/// Output of the virtual-cohomological-dimension detector over a tower.
#[derive(Clone, Debug)]
pub struct VcdReport {
    /// The detected dimension: one more than the number of uniformizers.
    pub m: usize,
    /// Witness tuple: the uniformizers plus a residue non-l-th-power.
    pub witness: Vec<FieldElement>,
    pub witness_classes: Vec<KummerClass>,
    /// Verified: the witness classes have full rank, so their cup is nonzero.
    pub witness_cup_nonzero: bool,
    /// Dimension of the class vector space: any `m + 1` classes have rank
    /// at most `m`.
    pub class_space_dim: usize,
    /// When the caller tags the tower as a `d`-dimensional arithmetic model
    /// (`u = d + 1` uniformizers): whether `d = m - 2` holds.
    pub model_consistency: Option<bool>,
}

/// Detects `m = u + 1` with an explicit full-rank witness. Requires the base
/// field to contain the `2l`-th roots of unity (`2l | q - 1`).
pub fn detect_vcd(f: &FieldDescriptor, ell: u64, model_d: Option<u64>) -> Result<VcdReport> {
    if !is_prime_u64(ell) {
        return Err(Error::invalid(format!("{ell} is not prime")));
    }
    if f.layer() != Layer::Tower || !f.is_finite_base() {
        return Err(Error::invalid(
            "vcd detection needs a tower with finite base and at least one uniformizer",
        ));
    }
    let ctx = f.fq_ctx().expect("finite base");
    if (ctx.q() - 1) % (2 * ell) != 0 {
        return Err(Error::unsupported(format!(
            "the base field F{} does not contain the {}-th roots of unity",
            ctx.q(),
            2 * ell
        )));
    }
    let u = f.tower_depth();
    let mut witness: Vec<FieldElement> = (0..u).map(|i| f.uniformizer(i).expect("depth checked")).collect();
    let non_power = ctx
        .elements()
        .find(|e| !e.is_zero() && !e.pow((ctx.q() - 1) / ell).is_one())
        .expect("the unit group is cyclic of order divisible by l");
    let mut exps = vec![0i64; u];
    exps.fill(0);
    witness.push(FieldElement::Tower(TowerMonomial {
        scalar: Scalar::Fq(non_power),
        exps,
    }));
    let witness_classes: Vec<KummerClass> = witness
        .iter()
        .map(|w| kummer_class(f, w, ell))
        .collect::<Result<_>>()?;
    let witness_cup_nonzero = cup_rank_classes(&witness_classes)? == CupRank::Nonzero;
    let m = u + 1;
    Ok(VcdReport {
        m,
        witness,
        witness_classes,
        witness_cup_nonzero,
        class_space_dim: m,
        model_consistency: model_d.map(|d| m as u64 == d + 2),
    })
}

// ---------------------------------------------------------------------------
// Bar-resolution cup products on finite elementary abelian groups
// ---------------------------------------------------------------------------

/// Characters of `(Z/l)^m` whose cup product is to be decided on the bar
/// complex.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroupCohSpec {
    pub ell: u64,
    pub m: usize,
    pub characters: Vec<Vec<u64>>,
}

pub const DEFAULT_BAR_CAP: u64 = 729;

impl FiniteGroupCohSpec {
    pub fn new(ell: u64, m: usize, characters: Vec<Vec<u64>>) -> Result<FiniteGroupCohSpec> {
        if ell != 2 && ell != 3 {
            return Err(Error::invalid("the bar oracle supports l in {2, 3}"));
        }
        if m == 0 || m > 3 {
            return Err(Error::invalid("the bar oracle supports 1 <= m <= 3"));
        }
        // n may exceed m (cup products of repeated characters are the
        // interesting case at l = 2); the linear-algebra cap bounds the size
        let n = characters.len();
        if n == 0 || n > 10 {
            return Err(Error::invalid("the number of characters must lie in 1..=10"));
        }
        let characters = characters
            .into_iter()
            .map(|v| {
                if v.len() != m {
                    Err(Error::invalid("character vector has the wrong length"))
                } else {
                    Ok(v.into_iter().map(|x| x % ell).collect())
                }
            })
            .collect::<Result<_>>()?;
        Ok(FiniteGroupCohSpec { ell, m, characters })
    }
}

/// Outcome of the coboundary decision for the cup cocycle.
#[derive(Clone, Debug)]
pub struct BarOutcome {
    pub vanishes: bool,
    /// For vanishing classes: a normalized `(n-1)`-cochain bounding the cup
    /// cocycle, indexed over non-identity tuples (verified before return).
    pub bounding_cochain: Option<Vec<u8>>,
}

/// Forms the explicit cup cocycle `c(g1, ..., gn) = prod chi_i(g_i)` and
/// decides by linear algebra over `F_l` whether it is a coboundary of a
/// normalized cochain.
pub fn cup_product_bar(spec: &FiniteGroupCohSpec) -> Result<BarOutcome> {
    cup_product_bar_with(spec, DEFAULT_BAR_CAP)
}

pub fn cup_product_bar_with(spec: &FiniteGroupCohSpec, cap: u64) -> Result<BarOutcome> {
    let ell = spec.ell;
    let m = spec.m as u32;
    let n = spec.characters.len();
    let unknowns = (ell.pow(m)).pow(n as u32 - 1);
    if unknowns > cap {
        return Err(Error::invalid(format!(
            "bar-resolution system of size {unknowns} exceeds the cap {cap}"
        )));
    }
    let g = ell.pow(m) as usize; // group order
    let nonid = g - 1;

    // digit helpers for (Z/l)^m
    let digits = |mut x: usize| -> Vec<u64> {
        let mut d = vec![0u64; m as usize];
        for v in d.iter_mut() {
            *v = (x % ell as usize) as u64;
            x /= ell as usize;
        }
        d
    };
    let group_mul = |a: usize, b: usize| -> usize {
        let (da, db) = (digits(a), digits(b));
        let mut out = 0usize;
        for j in (0..m as usize).rev() {
            out = out * ell as usize + ((da[j] + db[j]) % ell) as usize;
        }
        out
    };
    let chi = |i: usize, gidx: usize| -> u64 {
        let d = digits(gidx);
        let mut acc = 0u64;
        for j in 0..m as usize {
            acc = (acc + spec.characters[i][j] * d[j]) % ell;
        }
        acc
    };
    let cocycle = |tuple: &[usize]| -> u64 {
        let mut acc = 1u64;
        for (i, &gi) in tuple.iter().enumerate() {
            acc = acc * chi(i, gi) % ell;
        }
        acc
    };

    // column index of a non-identity (n-1)-tuple
    let col_of = |tuple: &[usize]| -> usize {
        let mut acc = 0usize;
        for &h in tuple.iter().rev() {
            debug_assert!(h != 0);
            acc = acc * nonid + (h - 1);
        }
        acc
    };
    let ncols = nonid.pow(n as u32 - 1);
    let width = ncols + 1; // + right-hand side

    let mut echelon = Echelon::new(ell as u8, width);
    let mut row_buf = vec![0u8; width];

    // iterate all non-identity n-tuples
    let mut tuple = vec![1usize; n];
    let mut inconsistent = false;
    'rows: loop {
        row_buf.iter_mut().for_each(|x| *x = 0);
        // d(f)(g1..gn) = f(g2..gn) - f(g1g2, g3..) + ... +- f(g1..g_{n-1})
        let mut sign = 1i64;
        if tuple[1..].iter().all(|&h| h != 0) {
            add_mod(&mut row_buf[col_of(&tuple[1..])], sign, ell);
        }
        for i in 0..n - 1 {
            sign = -sign;
            let merged = group_mul(tuple[i], tuple[i + 1]);
            if merged != 0 {
                let mut t: Vec<usize> = Vec::with_capacity(n - 1);
                t.extend_from_slice(&tuple[..i]);
                t.push(merged);
                t.extend_from_slice(&tuple[i + 2..]);
                add_mod(&mut row_buf[col_of(&t)], sign, ell);
            }
        }
        sign = -sign;
        if tuple[..n - 1].iter().all(|&h| h != 0) {
            add_mod(&mut row_buf[col_of(&tuple[..n - 1])], sign, ell);
        }
        row_buf[ncols] = cocycle(&tuple) as u8;
        if echelon.insert(&row_buf) == InsertOutcome::PivotAtRhs {
            inconsistent = true;
            break 'rows;
        }
        // odometer over non-identity elements
        for slot in tuple.iter_mut() {
            *slot += 1;
            if *slot <= nonid {
                continue 'rows;
            }
            *slot = 1;
        }
        break;
    }

    if inconsistent {
        return Ok(BarOutcome {
            vanishes: false,
            bounding_cochain: None,
        });
    }

    let solution = echelon.back_substitute();
    // verify the bounding cochain exactly
    let mut tuple = vec![1usize; n];
    'verify: loop {
        let mut val = 0i64;
        let f_at = |t: &[usize]| -> i64 {
            if t.iter().any(|&h| h == 0) {
                0
            } else {
                solution[col_of(t)] as i64
            }
        };
        val += f_at(&tuple[1..]);
        let mut sign = 1i64;
        for i in 0..n - 1 {
            sign = -sign;
            let merged = group_mul(tuple[i], tuple[i + 1]);
            let mut t: Vec<usize> = Vec::with_capacity(n - 1);
            t.extend_from_slice(&tuple[..i]);
            t.push(merged);
            t.extend_from_slice(&tuple[i + 2..]);
            val += sign * f_at(&t);
        }
        sign = -sign;
        val += sign * f_at(&tuple[..n - 1]);
        assert_eq!(
            val.rem_euclid(ell as i64) as u64,
            cocycle(&tuple),
            "solver produced an invalid bounding cochain"
        );
        for slot in tuple.iter_mut() {
            *slot += 1;
            if *slot <= nonid {
                continue 'verify;
            }
            *slot = 1;
        }
        break;
    }

    Ok(BarOutcome {
        vanishes: true,
        bounding_cochain: Some(solution),
    })
}

fn add_mod(slot: &mut u8, sign: i64, ell: u64) {
    let delta = if sign >= 0 { 1i64 } else { ell as i64 - 1 };
    *slot = ((*slot as i64 + delta) % ell as i64) as u8;
}

#[derive(PartialEq, Eq)]
enum InsertOutcome {
    ReducedToZero,
    NewPivot,
    PivotAtRhs,
}

/// Streaming row echelon over `F_l` with dense `u8` rows; the last column is
/// the right-hand side, so a pivot there means inconsistency.
struct Echelon {
    ell: u8,
    width: usize,
    pivot_row_of_col: Vec<Option<usize>>,
    rows: Vec<Vec<u8>>,
    pivot_col_of_row: Vec<usize>,
}

impl Echelon {
    fn new(ell: u8, width: usize) -> Echelon {
        Echelon {
            ell,
            width,
            pivot_row_of_col: vec![None; width],
            rows: Vec::new(),
            pivot_col_of_row: Vec::new(),
        }
    }

    fn insert(&mut self, row: &[u8]) -> InsertOutcome {
        let ell = self.ell as u16;
        let mut row = row.to_vec();
        let mut j = 0;
        while j < self.width {
            if row[j] == 0 {
                j += 1;
                continue;
            }
            match self.pivot_row_of_col[j] {
                Some(r) => {
                    let c = row[j] as u16;
                    let prow = &self.rows[r];
                    for k in j..self.width {
                        row[k] = ((row[k] as u16 + (ell - c) * prow[k] as u16) % ell) as u8;
                    }
                    j += 1;
                }
                None => {
                    // normalize and register
                    let inv = match (self.ell, row[j]) {
                        (_, 1) => 1u16,
                        (3, 2) => 2,
                        _ => unreachable!("l is 2 or 3"),
                    };
                    for k in j..self.width {
                        row[k] = (row[k] as u16 * inv % ell) as u8;
                    }
                    if j == self.width - 1 {
                        return InsertOutcome::PivotAtRhs;
                    }
                    self.pivot_row_of_col[j] = Some(self.rows.len());
                    self.rows.push(row);
                    self.pivot_col_of_row.push(j);
                    return InsertOutcome::NewPivot;
                }
            }
        }
        InsertOutcome::ReducedToZero
    }

    /// A particular solution of `Mx = rhs` (free variables set to zero).
    fn back_substitute(&self) -> Vec<u8> {
        let ell = self.ell as i64;
        let ncols = self.width - 1;
        let mut x = vec![0u8; ncols];
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| std::cmp::Reverse(self.pivot_col_of_row[r]));
        for &r in &order {
            let pc = self.pivot_col_of_row[r];
            let row = &self.rows[r];
            let mut acc = row[ncols] as i64;
            for j in pc + 1..ncols {
                if row[j] != 0 && x[j] != 0 {
                    acc -= row[j] as i64 * x[j] as i64;
                }
            }
            x[pc] = acc.rem_euclid(ell) as u8;
        }
        x
    }
}
