//! Exact Dirichlet characters mod q and the true maxima of their
//! partial sums.
//!
//! Characters are never stored as floating-point values: each one is a
//! table of root-of-unity exponents (plus a zero mark on non-units),
//! assembled from discrete logarithms in the prime-power components of
//! (ℤ/q)*. That keeps orthogonality and multiplicativity checkable as
//! exact integer identities. Floats appear in exactly one place — the
//! magnitude comparisons inside the partial-sum maxima — and there the
//! prefix sums are compensated and comparisons carry a small absolute
//! guard on squared magnitudes.

use num_complex::Complex;
use num_integer::lcm;

use crate::arith::{euler_phi, factorize, gcd, primitive_root};
use crate::gauss::{gauss_int, GaussRational};
use crate::periodic::PeriodicFunction;
use crate::{Error, Result};

/// Hard cap on the modulus of a [`CharacterGroup`]; the tables are O(q).
pub const MAX_Q: u64 = 1_000_000;

/// Cap for [`enumerate_characters`], which materializes φ(q) tables of
/// length q at once.
pub const MAX_ENUM_Q: u64 = 10_000;

/// Absolute guard on squared magnitudes when comparing partial sums:
/// differences below this count as ties.
pub const MAG_GUARD: f64 = 1e-12;

const ZERO_MARK: u32 = u32::MAX;

/// One cyclic factor of a prime-power unit group: a generator and its
/// order. Odd prime powers contribute one slot; 2ᵏ contributes none
/// (k=1), one (k=2), or two (k≥3: the −1 slot of order 2 and the 5 slot
/// of order 2ᵏ⁻²).
#[derive(Clone, Debug)]
pub struct GeneratorSlot {
    pub modulus: u64,
    pub generator: u64,
    pub order: u64,
}

/// The full character group mod q: component generators plus a discrete
/// logarithm table for every residue, from which any single character
/// can be materialized directly.
#[derive(Clone, Debug)]
pub struct CharacterGroup {
    q: u64,
    factorization: Vec<(u64, u32)>,
    slots: Vec<GeneratorSlot>,
    /// Flattened per-residue discrete logs: entry r·s_count + s is the
    /// log of r in slot s. Meaningful only where `unit[r]`.
    dlogs: Vec<u32>,
    unit: Vec<bool>,
    /// lcm of the slot orders — the largest possible character order.
    exponent: u64,
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Self> {
        if !(1..=MAX_Q).contains(&q) {
            return Err(Error::Usage(format!("modulus {q} outside 1..={MAX_Q}")));
        }
        let factorization = factorize(q);
        let mut slots = Vec::new();
        for &(p, e) in &factorization {
            let pe = p.pow(e);
            if p == 2 {
                match e {
                    1 => {}
                    2 => slots.push(GeneratorSlot { modulus: 4, generator: 3, order: 2 }),
                    _ => {
                        slots.push(GeneratorSlot { modulus: pe, generator: pe - 1, order: 2 });
                        slots.push(GeneratorSlot { modulus: pe, generator: 5, order: pe / 4 });
                    }
                }
            } else {
                slots.push(GeneratorSlot {
                    modulus: pe,
                    generator: primitive_root(pe),
                    order: euler_phi(pe),
                });
            }
        }

        // Per-component joint dlog tables, then flatten across residues.
        let mut component_tables: Vec<(u64, Vec<u32>, usize)> = Vec::new(); // (modulus, table, slots here)
        let mut s_cursor = 0usize;
        while s_cursor < slots.len() {
            let m = slots[s_cursor].modulus;
            let here = slots[s_cursor..]
                .iter()
                .take_while(|s| s.modulus == m)
                .count();
            let mut table = vec![ZERO_MARK; (m as usize) * here];
            match here {
                1 => {
                    let g = slots[s_cursor].generator;
                    let ord = slots[s_cursor].order;
                    let mut r = 1u64;
                    for t in 0..ord {
                        table[r as usize] = t as u32;
                        r = r * g % m;
                    }
                }
                2 => {
                    let half = slots[s_cursor + 1].order;
                    for a in 0..2u64 {
                        let mut r = if a == 0 { 1 } else { m - 1 };
                        for b in 0..half {
                            table[(r as usize) * 2] = a as u32;
                            table[(r as usize) * 2 + 1] = b as u32;
                            r = r * 5 % m;
                        }
                    }
                }
                _ => unreachable!("at most two slots per component"),
            }
            component_tables.push((m, table, here));
            s_cursor += here;
        }

        let s_count = slots.len();
        let mut dlogs = vec![0u32; q as usize * s_count];
        let mut unit = vec![false; q as usize];
        for r in 0..q {
            if gcd(r, q) != 1 {
                continue;
            }
            unit[r as usize] = true;
            let mut s = 0usize;
            for (m, table, here) in &component_tables {
                let local = (r % m) as usize;
                for t in 0..*here {
                    dlogs[r as usize * s_count + s + t] = table[local * here + t];
                }
                s += here;
            }
        }

        let exponent = slots.iter().fold(1u64, |acc, s| lcm(acc, s.order));
        let group = CharacterGroup { q, factorization, slots, dlogs, unit, exponent };
        debug_assert_eq!(group.num_characters(), euler_phi(q));
        Ok(group)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.factorization
    }

    pub fn generator_slots(&self) -> &[GeneratorSlot] {
        &self.slots
    }

    /// φ(q), the number of characters.
    pub fn num_characters(&self) -> u64 {
        self.slots.iter().map(|s| s.order).product()
    }

    /// The group exponent λ(q): every character order divides this.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Materializes the character with the given index. Indices run
    /// lexicographically over the per-slot exponent tuples (last slot
    /// fastest); index 0 is the principal character. The ordering is
    /// deterministic, so indices are stable join keys across runs.
    pub fn character(&self, index: u64) -> Result<DirichletCharacter> {
        let total = self.num_characters();
        if index >= total {
            return Err(Error::Usage(format!(
                "character index {index} outside 0..{total}"
            )));
        }
        let mut tuple = vec![0u64; self.slots.len()];
        let mut rest = index;
        for s in (0..self.slots.len()).rev() {
            tuple[s] = rest % self.slots[s].order;
            rest /= self.slots[s].order;
        }

        // The character's own order: lcm of the orders of ζ^{e_s}.
        let mut order = 1u64;
        for (s, &e) in tuple.iter().enumerate() {
            order = lcm(order, self.slots[s].order / gcd(e, self.slots[s].order));
        }

        let s_count = self.slots.len();
        let mut exps = vec![ZERO_MARK; self.q as usize];
        for r in 0..self.q as usize {
            if !self.unit[r] {
                continue;
            }
            let mut acc = 0u64;
            for (s, &e) in tuple.iter().enumerate() {
                let slot_ord = self.slots[s].order;
                let g = gcd(e, slot_ord);
                let reduced_ord = slot_ord / g;
                let reduced_e = e / g;
                let d = self.dlogs[r * s_count + s] as u64;
                // ζ_slot^{e·d} = ζ_order^{(order/reduced_ord)·(reduced_e·d mod reduced_ord)}
                acc = (acc + order / reduced_ord * (reduced_e * d % reduced_ord)) % order;
            }
            exps[r] = acc as u32;
        }

        let parity_exp = exps[(self.q - 1) as usize];
        let parity = if parity_exp == 0 {
            1
        } else if parity_exp as u64 * 2 == order {
            -1
        } else {
            unreachable!("χ(−1)² = 1 forces exponent 0 or order/2")
        };

        Ok(DirichletCharacter {
            q: self.q,
            index,
            order,
            exps,
            principal: index == 0,
            parity,
        })
    }
}

/// Returns all φ(q) characters mod q, ordered by index.
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    if !(1..=MAX_ENUM_Q).contains(&q) {
        return Err(Error::Usage(format!(
            "modulus {q} outside 1..={MAX_ENUM_Q} for full enumeration"
        )));
    }
    let group = CharacterGroup::new(q)?;
    (0..group.num_characters())
        .map(|i| group.character(i))
        .collect()
}

/// An exact character value: zero, or the root of unity e^(2πi·num/den)
/// with the fraction in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharValue {
    Zero,
    Root { num: u64, den: u64 },
}

impl CharValue {
    fn root(num: u64, den: u64) -> Self {
        let num = num % den;
        let g = gcd(num, den);
        CharValue::Root { num: num / g, den: den / g }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CharValue::Zero)
    }

    pub fn to_f64(&self) -> Complex<f64> {
        match *self {
            CharValue::Zero => Complex::new(0.0, 0.0),
            CharValue::Root { num, den } => root_f64(num, den),
        }
    }

    /// Exact complex-rational value, available when the root lies in
    /// {±1, ±i}, i.e. the reduced denominator divides 4.
    pub fn to_gauss(&self) -> Option<GaussRational> {
        match *self {
            CharValue::Zero => Some(gauss_int(0, 0)),
            CharValue::Root { num, den } => match (num, den) {
                (0, 1) => Some(gauss_int(1, 0)),
                (1, 2) => Some(gauss_int(-1, 0)),
                (1, 4) => Some(gauss_int(0, 1)),
                (3, 4) => Some(gauss_int(0, -1)),
                _ => None,
            },
        }
    }
}

/// A single Dirichlet character mod q, stored exactly: for each residue
/// the exponent t with χ(r) = e^(2πi·t/order), or a zero mark on
/// residues sharing a factor with q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    q: u64,
    index: u64,
    order: u64,
    exps: Vec<u32>,
    principal: bool,
    parity: i8,
}

impl DirichletCharacter {
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Position in the group's deterministic enumeration; 0 is principal.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Multiplicative order: the smallest m with χᵐ principal.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    /// χ(−1): +1 for even characters, −1 for odd ones.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    /// The exponent t with χ(n) = e^(2πi·t/order), or None on the zeros.
    pub fn exponent_at(&self, n: i64) -> Option<u64> {
        let e = self.exps[n.rem_euclid(self.q as i64) as usize];
        (e != ZERO_MARK).then_some(e as u64)
    }

    /// The exact value at any integer.
    pub fn value(&self, n: i64) -> CharValue {
        match self.exponent_at(n) {
            None => CharValue::Zero,
            Some(e) => CharValue::root(e, self.order),
        }
    }

    /// All q values as floats, materialized through one table of the
    /// order-many roots of unity.
    pub fn values_f64(&self) -> Vec<Complex<f64>> {
        let roots: Vec<Complex<f64>> = (0..self.order)
            .map(|t| root_f64(t, self.order))
            .collect();
        self.exps
            .iter()
            .map(|&e| {
                if e == ZERO_MARK {
                    Complex::new(0.0, 0.0)
                } else {
                    roots[e as usize]
                }
            })
            .collect()
    }

    /// The character as an exact periodic function, available when its
    /// order divides 4 (values all lie in {0, ±1, ±i}).
    pub fn to_periodic(&self) -> Option<PeriodicFunction> {
        if 4 % self.order != 0 {
            return None;
        }
        let values: Option<Vec<GaussRational>> =
            (0..self.q as i64).map(|r| self.value(r).to_gauss()).collect();
        Some(PeriodicFunction::new(self.q, values?).expect("q values for period q"))
    }

    /// Float analogue of the exact window-moment scan: the largest
    /// (1/(qK))·Σₙ|Σ_{k≤K} χ(n+k)|² over K ≤ k_max and the smallest K
    /// attaining it. Principal characters have nonzero mean, reported as
    /// (+∞, 0). Nonprincipal characters are treated as exactly
    /// mean-zero, which they are.
    pub fn min_b_numeric(&self, k_max: u64) -> Result<(f64, u64)> {
        if k_max < 1 {
            return Err(Error::Usage(format!("k_max must be >= 1, got {k_max}")));
        }
        if self.principal {
            return Ok((f64::INFINITY, 0));
        }
        let vals = self.values_f64();
        let q = self.q as usize;
        let mut windows = vec![Complex::new(0.0, 0.0); q];
        let mut best = (-1.0f64, 0u64);
        for k in 1..=k_max {
            for (i, w) in windows.iter_mut().enumerate() {
                *w += vals[(i + 1 + k as usize) % q];
            }
            let moment: f64 = windows.iter().map(|w| w.norm_sqr()).sum();
            let b = moment / (self.q * k) as f64;
            if b > best.0 {
                best = (b, k);
            }
        }
        Ok(best)
    }
}

/// e^(2πi·t/den) as a float. Quarter turns are emitted exactly (they
/// are representable, and keeping them exact means every character of
/// order dividing 4 has bit-exact integer prefix sums, so coincident
/// prefix points stay coincident instead of splitting by rounding dust).
fn root_f64(t: u64, den: u64) -> Complex<f64> {
    if t * 4 % den == 0 {
        match t * 4 / den % 4 {
            0 => Complex::new(1.0, 0.0),
            1 => Complex::new(0.0, 1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, -1.0),
        }
    } else {
        let (s, c) = (2.0 * std::f64::consts::PI * t as f64 / den as f64).sin_cos();
        Complex::new(c, s)
    }
}

/// Neumaier-compensated accumulator: keeps the low-order bits that a
/// plain f64 sum of thousands of unit-sized terms would shed.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Prefix points P(j) = Σ_{a=0}^{j} χ(a) for j = −1..q, as q+2 planar
/// points; index pi holds P(pi−1). Every window sum Σ_{n=M}^{N} χ(n)
/// with 0 ≤ M < N ≤ q is the difference of two of them, at least two
/// indices apart.
fn prefix_points(chi: &DirichletCharacter) -> Vec<(f64, f64)> {
    let vals = chi.values_f64();
    let q = chi.q as usize;
    let mut re = Compensated::default();
    let mut im = Compensated::default();
    let mut out = Vec::with_capacity(q + 2);
    out.push((0.0, 0.0));
    for j in 0..=q {
        let v = vals[j % q];
        re.add(v.re);
        im.add(v.im);
        out.push((re.value(), im.value()));
    }
    out
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Andrew's monotone chain; collinear points are dropped. Input need
/// not be sorted or unique.
fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // Upper chain; must not pop back into the finished lower chain.
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop(); // the loop closes back on the start point
    hull
}

struct MaxScan {
    /// Squared magnitude of the best window sum.
    best_sq: f64,
    /// Witness as prefix-array indices (a, b), b ≥ a+2.
    witness: (usize, usize),
}

/// O(q²) scan over all admissible prefix pairs: the maximum squared
/// magnitude, then the lexicographically first pair within the guard of
/// it. This is the reference path; `s_chi` only reaches it when the
/// hull shortcut cannot certify its answer.
fn full_pair_scan(pts: &[(f64, f64)]) -> MaxScan {
    let mut best_sq = -1.0f64;
    for a in 0..pts.len() {
        for b in a + 2..pts.len() {
            let d2 = dist2(pts[a], pts[b]);
            if d2 > best_sq {
                best_sq = d2;
            }
        }
    }
    for a in 0..pts.len() {
        for b in a + 2..pts.len() {
            if dist2(pts[a], pts[b]) >= best_sq - MAG_GUARD {
                return MaxScan { best_sq, witness: (a, b) };
            }
        }
    }
    unreachable!("the maximizing pair exists")
}

/// The maximum |Σ_{n=M}^{N} χ(n)| over 0 ≤ M < N ≤ q together with the
/// attaining window, ties resolved toward the lexicographically
/// smallest (M, N).
///
/// Fast path: the maximum is the diameter of the prefix point set, so
/// the convex hull is scanned instead of all O(q²) pairs; the full scan
/// remains as a fallback for the rare case where the diameter is
/// attained only by prefix indices too close together to form a window.
/// Principal characters are accepted (their prefix walk never returns
/// to the origin; the result is still the literal maximum).
pub fn s_chi(chi: &DirichletCharacter) -> (f64, (u64, u64)) {
    let pts = prefix_points(chi);
    let scan = hull_scan(&pts).unwrap_or_else(|| full_pair_scan(&pts));
    let (a, b) = scan.witness;
    (scan.best_sq.max(0.0).sqrt(), (a as u64, b as u64 - 1))
}

/// Value-only variant of [`s_chi`] for bulk scans; skips the witness
/// bookkeeping.
pub fn s_chi_value(chi: &DirichletCharacter) -> f64 {
    let pts = prefix_points(chi);
    let scan = hull_scan(&pts).unwrap_or_else(|| full_pair_scan(&pts));
    scan.best_sq.max(0.0).sqrt()
}

/// Reference implementation of [`s_chi`]: literal pair scan, no hull.
pub fn s_chi_pair_scan(chi: &DirichletCharacter) -> (f64, (u64, u64)) {
    let pts = prefix_points(chi);
    let scan = full_pair_scan(&pts);
    let (a, b) = scan.witness;
    (scan.best_sq.max(0.0).sqrt(), (a as u64, b as u64 - 1))
}

/// Hull-accelerated version of [`full_pair_scan`]. The diameter of the
/// point set is attained between hull vertices, so every near-maximal
/// pair has both endpoints in the small set of points that come within
/// the guard of the diameter; running the reference scan on just those
/// candidates reproduces its result bit for bit — same maximum, same
/// witness. Returns None when no admissible candidate pair reaches the
/// diameter (then nothing is certified and the caller must run the full
/// scan).
fn hull_scan(pts: &[(f64, f64)]) -> Option<MaxScan> {
    let hull = convex_hull(pts);
    if hull.len() < 2 {
        // All prefix points identical — every window sums to (numerically)
        // zero; the guard treats them all as ties.
        return Some(MaxScan { best_sq: 0.0, witness: (0, 2) });
    }

    let mut diam_sq = 0.0f64;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            diam_sq = diam_sq.max(dist2(hull[i], hull[j]));
        }
    }

    // The farthest point from any p is a hull vertex, so p can sit in a
    // near-maximal pair only if some vertex is nearly a diameter away.
    // The doubled absolute slack keeps pairs that straddle the guard
    // boundary; the relative term absorbs the rounding of dist2 itself,
    // which outgrows the absolute guard once coordinates reach the
    // hundreds.
    let cutoff = diam_sq - 2.0 * MAG_GUARD - diam_sq * 1e-13;
    let cand: Vec<usize> = (0..pts.len())
        .filter(|&i| {
            hull.iter().any(|&h| dist2(pts[i], h) >= cutoff)
        })
        .collect();

    let mut best_sq = -1.0f64;
    for (s, &a) in cand.iter().enumerate() {
        for &b in &cand[s + 1..] {
            if b >= a + 2 {
                best_sq = best_sq.max(dist2(pts[a], pts[b]));
            }
        }
    }
    if best_sq < diam_sq - MAG_GUARD {
        return None;
    }
    // Candidates are in ascending index order, so this lexicographic
    // sweep finds the same witness the reference scan would.
    for (s, &a) in cand.iter().enumerate() {
        for &b in &cand[s + 1..] {
            if b >= a + 2 && dist2(pts[a], pts[b]) >= best_sq - MAG_GUARD {
                return Some(MaxScan { best_sq, witness: (a, b) });
            }
        }
    }
    unreachable!("an admissible candidate pair attains the maximum")
}

/// The maximum |Σ_{a=0}^{N} χ(a)| over one period 0 ≤ N < q.
///
/// For nonprincipal characters a single period is the whole story (the
/// full-period sum is zero, so longer prefixes repeat these values);
/// for the principal character the prefix sums grow without bound and
/// this one-period maximum is a convention, flagged to callers by
/// [`DirichletCharacter::is_principal`].
pub fn t_chi(chi: &DirichletCharacter) -> f64 {
    let pts = prefix_points(chi);
    let mut best = 0.0f64;
    for &p in &pts[1..=chi.q as usize] {
        best = best.max(dist2((0.0, 0.0), p));
    }
    best.sqrt()
}
