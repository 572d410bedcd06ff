//! Integral root systems, multiplicity functions, Weyl groups, and the
//! radial/angular decomposition x = w·x^W.
//!
//! The classical families A/B/C/D and the non-reduced BC are built in their
//! standard coordinate realizations; A_n lives inside the sum-zero hyperplane
//! of ℝ^{n+1}, expressed in an explicit orthonormal basis of that subspace so
//! the ambient inner product stays the literal dot product. Group elements are
//! deduplicated by their exact action on the root list (a permutation), never
//! by floating-point matrix comparison.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm2, point_from, Matrix, Point};

/// Tolerance for matching computed root images against the root list. Root
/// coordinates are O(1); accumulated error over a few reflections is ~1e-14.
const ROOT_MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Family {
    A,
    B,
    C,
    D,
    #[serde(rename = "BC")]
    Bc,
    #[serde(rename = "rank1")]
    Rank1,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::Bc => "BC",
            Family::Rank1 => "rank1",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "BC" => Ok(Family::Bc),
            "RANK1" | "R1" => Ok(Family::Rank1),
            other => Err(Error::InvalidSystem(format!("unknown family '{other}'"))),
        }
    }
}

/// Root length normalization. All downstream coefficients depend on |α|, so
/// the scale is explicit configuration rather than a hidden convention.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Classical coordinates: B/C/D/BC as signed-permutation realizations,
    /// A in the projected sum-zero hyperplane, rank1 root α = 2 (so that
    /// coth(⟨α,x⟩/2) = coth(x)).
    Standard,
    /// Standard realization rescaled so the shortest root has |α|² = 2.
    ShortRootSq2,
    /// Standard realization multiplied by the given factor.
    Scaled(f64),
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalization::Standard => write!(f, "standard"),
            Normalization::ShortRootSq2 => write!(f, "short_root_sq2"),
            Normalization::Scaled(c) => write!(f, "scale:{c}"),
        }
    }
}

impl FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Normalization::Standard),
            "short_root_sq2" | "short2" => Ok(Normalization::ShortRootSq2),
            other => {
                if let Some(v) = other.strip_prefix("scale:") {
                    let c: f64 = v
                        .parse()
                        .map_err(|_| Error::InvalidSystem(format!("bad scale '{v}'")))?;
                    if c <= 0.0 {
                        return Err(Error::InvalidSystem("scale must be positive".into()));
                    }
                    Ok(Normalization::Scaled(c))
                } else {
                    Err(Error::InvalidSystem(format!("unknown normalization '{other}'")))
                }
            }
        }
    }
}

/// An integral root system in its ambient Euclidean space.
///
/// `roots` lists the positive roots first (indices `0..n_positive`), followed
/// by their negatives in the same order (`n_positive + i` is `-roots[i]`).
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub normalization: Normalization,
    pub roots: Vec<Point>,
    pub n_positive: usize,
    /// 2α/|α|² per root.
    pub coroots: Vec<Point>,
    /// |α|² per root.
    pub norm2: Vec<f64>,
    /// |α| per root.
    pub norm: Vec<f64>,
    /// Weyl-orbit index per root; orbits are sorted by (|α|², first index).
    pub orbit_of: Vec<usize>,
    pub orbit_names: Vec<String>,
    /// Indices (into the positive list) of the simple roots used as Weyl
    /// group generators.
    pub simple: Vec<usize>,
}

impl RootSystem {
    /// Construct one of the supported families at the given rank.
    pub fn build(family: Family, rank: usize, normalization: Normalization) -> Result<Self> {
        let positive: Vec<Point> = match family {
            Family::Rank1 => {
                if rank != 1 {
                    return Err(Error::InvalidSystem("rank1 requires rank = 1".into()));
                }
                vec![point_from(&[2.0])]
            }
            Family::A => {
                if rank < 1 {
                    return Err(Error::InvalidSystem("A requires rank >= 1".into()));
                }
                build_a_positive(rank)
            }
            Family::B | Family::C | Family::D | Family::Bc => {
                let min_rank = if family == Family::Bc { 1 } else { 2 };
                if rank < min_rank {
                    return Err(Error::InvalidSystem(format!(
                        "{family} requires rank >= {min_rank}"
                    )));
                }
                let mut pos: Vec<Point> = Vec::new();
                for i in 0..rank {
                    for j in (i + 1)..rank {
                        let mut v = linalg::zeros(rank);
                        v[i] = 1.0;
                        v[j] = -1.0;
                        pos.push(v.clone());
                        v[j] = 1.0;
                        pos.push(v);
                    }
                }
                match family {
                    Family::B => {
                        for i in 0..rank {
                            let mut v = linalg::zeros(rank);
                            v[i] = 1.0;
                            pos.push(v);
                        }
                    }
                    Family::C => {
                        for i in 0..rank {
                            let mut v = linalg::zeros(rank);
                            v[i] = 2.0;
                            pos.push(v);
                        }
                    }
                    Family::Bc => {
                        for i in 0..rank {
                            let mut v = linalg::zeros(rank);
                            v[i] = 1.0;
                            pos.push(v.clone());
                            v[i] = 2.0;
                            pos.push(v);
                        }
                    }
                    _ => {}
                }
                pos
            }
        };

        let scale = match normalization {
            Normalization::Standard => 1.0,
            Normalization::Scaled(c) => c,
            Normalization::ShortRootSq2 => {
                let min2 = positive.iter().map(|r| norm2(r)).fold(f64::INFINITY, f64::min);
                (2.0 / min2).sqrt()
            }
        };
        let positive: Vec<Point> =
            positive.into_iter().map(|r| linalg::scaled(&r, scale)).collect();

        let n_positive = positive.len();
        let mut roots = positive;
        for i in 0..n_positive {
            roots.push(linalg::scaled(&roots[i], -1.0));
        }
        let norm2v: Vec<f64> = roots.iter().map(|r| norm2(r)).collect();
        let normv: Vec<f64> = norm2v.iter().map(|n2| n2.sqrt()).collect();
        let coroots: Vec<Point> =
            roots.iter().zip(&norm2v).map(|(r, &n2)| linalg::scaled(r, 2.0 / n2)).collect();

        let simple = simple_root_indices(family, rank, &roots[..n_positive]);

        let mut sys = RootSystem {
            family,
            rank,
            normalization,
            roots,
            n_positive,
            coroots,
            norm2: norm2v,
            norm: normv,
            orbit_of: Vec::new(),
            orbit_names: Vec::new(),
            simple,
        };
        sys.check_closure_and_integrality()?;
        sys.compute_orbits();
        Ok(sys)
    }

    /// Full root list (positive then negative).
    pub fn all_roots(&self) -> &[Point] {
        &self.roots
    }

    pub fn positive(&self) -> &[Point] {
        &self.roots[..self.n_positive]
    }

    /// ⟨α_i, x⟩.
    pub fn pairing(&self, root: usize, x: &[f64]) -> f64 {
        dot(&self.roots[root], x)
    }

    /// Index of the root equal to `v`, matched within tolerance.
    pub fn find_root(&self, v: &[f64]) -> Option<usize> {
        self.roots.iter().position(|r| linalg::dist(r, v) < ROOT_MATCH_TOL)
    }

    /// r_α(x) for the root with the given index.
    pub fn reflect_index(&self, root: usize, x: &[f64]) -> Point {
        let c = dot(&self.coroots[root], x);
        let mut y = point_from(x);
        linalg::axpy(&mut y, -c, &self.roots[root]);
        y
    }

    /// Distance from x to the nearest reflection wall.
    pub fn wall_distance(&self, x: &[f64]) -> f64 {
        self.positive()
            .iter()
            .zip(&self.norm)
            .map(|(a, n)| dot(a, x).abs() / n)
            .fold(f64::INFINITY, f64::min)
    }

    /// All positive pairings strictly positive.
    pub fn in_open_chamber(&self, x: &[f64]) -> bool {
        (0..self.n_positive).all(|i| self.pairing(i, x) > 0.0)
    }

    /// Pairing sign pattern against the positive roots; regular points keep
    /// this pattern along a continuous wall-avoiding path.
    pub fn sign_pattern(&self, x: &[f64]) -> smallvec::SmallVec<[bool; 8]> {
        (0..self.n_positive).map(|i| self.pairing(i, x) > 0.0).collect()
    }

    pub fn is_regular(&self, x: &[f64]) -> bool {
        let scale = 1.0 + linalg::norm(x);
        (0..self.n_positive).all(|i| self.pairing(i, x).abs() > 1e-12 * scale)
    }

    fn check_closure_and_integrality(&self) -> Result<()> {
        for i in 0..self.roots.len() {
            for j in 0..self.roots.len() {
                let pair = dot(&self.coroots[i], &self.roots[j]);
                if (pair - pair.round()).abs() > ROOT_MATCH_TOL {
                    return Err(Error::InvalidSystem(format!(
                        "non-integral pairing <a{i}^v, a{j}> = {pair}"
                    )));
                }
                let image = self.reflect_index(i, &self.roots[j]);
                if self.find_root(&image).is_none() {
                    return Err(Error::InvalidSystem(format!(
                        "reflection of root {j} by root {i} leaves the system"
                    )));
                }
            }
        }
        // Reduced except for the BC doubling.
        if self.family != Family::Bc {
            for i in 0..self.n_positive {
                for j in 0..self.n_positive {
                    if i != j
                        && linalg::dist(&linalg::scaled(&self.roots[i], 2.0), &self.roots[j])
                            < ROOT_MATCH_TOL
                    {
                        return Err(Error::InvalidSystem(
                            "proportional roots outside family BC".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Weyl orbits by closure under all reflections.
    fn compute_orbits(&mut self) {
        let n = self.roots.len();
        let mut orbit = vec![usize::MAX; n];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if orbit[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut members = Vec::new();
            let mut queue = VecDeque::from([start]);
            orbit[start] = id;
            while let Some(r) = queue.pop_front() {
                members.push(r);
                for g in 0..n {
                    let image = self.reflect_index(g, &self.roots[r]);
                    let idx = self
                        .find_root(&image)
                        .expect("closure verified before orbit computation");
                    if orbit[idx] == usize::MAX {
                        orbit[idx] = id;
                        queue.push_back(idx);
                    }
                }
            }
            orbits.push(members);
        }
        // Canonical order: ascending |α|², then first appearance.
        let mut order: Vec<usize> = (0..orbits.len()).collect();
        order.sort_by(|&a, &b| {
            let na = self.norm2[orbits[a][0]];
            let nb = self.norm2[orbits[b][0]];
            na.partial_cmp(&nb).unwrap().then(orbits[a][0].cmp(&orbits[b][0]))
        });
        let mut relabel = vec![0usize; orbits.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        self.orbit_of = orbit.iter().map(|&o| relabel[o]).collect();
        self.orbit_names = orbit_names(order.len());
    }

    pub fn n_orbits(&self) -> usize {
        self.orbit_names.len()
    }
}

fn orbit_names(n: usize) -> Vec<String> {
    match n {
        1 => vec!["all".into()],
        2 => vec!["short".into(), "long".into()],
        3 => vec!["short".into(), "medium".into(), "long".into()],
        _ => (0..n).map(|i| format!("orbit{i}")).collect(),
    }
}

/// A_n positive roots e_i - e_j (i < j) of ℝ^{n+1}, written in an orthonormal
/// basis of the sum-zero hyperplane.
fn build_a_positive(rank: usize) -> Vec<Point> {
    let m = rank + 1;
    // Orthonormal basis v_k ∝ (1,..,1,-k,0,..,0) with k ones.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(rank);
    for k in 1..=rank {
        let mut v = vec![0.0; m];
        let norm = ((k * k + k) as f64).sqrt();
        for item in v.iter_mut().take(k) {
            *item = 1.0 / norm;
        }
        v[k] = -(k as f64) / norm;
        basis.push(v);
    }
    let mut pos = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let mut ambient = vec![0.0; m];
            ambient[i] = 1.0;
            ambient[j] = -1.0;
            let projected: Point = basis.iter().map(|v| dot(v, &ambient)).collect();
            pos.push(projected);
        }
    }
    pos
}

/// Indices of the standard simple roots inside the positive list, matched by
/// direction so the choice is normalization-independent.
fn simple_root_indices(family: Family, rank: usize, positive: &[Point]) -> Vec<usize> {
    let find_dir = |d: &[f64]| -> usize {
        positive
            .iter()
            .position(|r| {
                let c = dot(r, d) / (linalg::norm(r) * linalg::norm(d));
                (c - 1.0).abs() < 1e-9
            })
            .expect("simple root present in positive list")
    };
    match family {
        Family::Rank1 => vec![0],
        Family::A => {
            // Projections of the ambient simple roots e_i - e_{i+1}.
            let m = rank + 1;
            let mut basis: Vec<Vec<f64>> = Vec::with_capacity(rank);
            for k in 1..=rank {
                let mut v = vec![0.0; m];
                let norm = ((k * k + k) as f64).sqrt();
                for item in v.iter_mut().take(k) {
                    *item = 1.0 / norm;
                }
                v[k] = -(k as f64) / norm;
                basis.push(v);
            }
            (0..rank)
                .map(|i| {
                    let mut ambient = vec![0.0; m];
                    ambient[i] = 1.0;
                    ambient[i + 1] = -1.0;
                    let proj: Vec<f64> = basis.iter().map(|v| dot(v, &ambient)).collect();
                    find_dir(&proj)
                })
                .collect()
        }
        Family::B | Family::C | Family::D | Family::Bc => {
            let mut dirs: Vec<Vec<f64>> = Vec::new();
            for i in 0..rank.saturating_sub(1) {
                let mut v = vec![0.0; rank];
                v[i] = 1.0;
                v[i + 1] = -1.0;
                dirs.push(v);
            }
            match family {
                Family::B | Family::Bc => {
                    let mut v = vec![0.0; rank];
                    v[rank - 1] = 1.0;
                    dirs.push(v);
                }
                Family::C => {
                    let mut v = vec![0.0; rank];
                    v[rank - 1] = 2.0;
                    dirs.push(v);
                }
                Family::D => {
                    let mut v = vec![0.0; rank];
                    v[rank - 2] = 1.0;
                    v[rank - 1] = 1.0;
                    dirs.push(v);
                }
                _ => unreachable!(),
            }
            dirs.iter().map(|d| find_dir(d)).collect()
        }
    }
}

/// r_α(x) = x − ⟨α∨, x⟩ α for an arbitrary nonzero α.
pub fn reflect(alpha: &[f64], x: &[f64]) -> Point {
    let c = 2.0 * dot(alpha, x) / norm2(alpha);
    let mut y = point_from(x);
    linalg::axpy(&mut y, -c, alpha);
    y
}

/// W-invariant multiplicity function, one value per Weyl orbit, all ≥ 1/2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplicityFunction {
    per_orbit: Vec<f64>,
}

impl MultiplicityFunction {
    pub fn new(system: &RootSystem, per_orbit: Vec<f64>) -> Result<Self> {
        if per_orbit.len() != system.n_orbits() {
            return Err(Error::InvalidMultiplicity(format!(
                "expected {} orbit values ({}), got {}",
                system.n_orbits(),
                system.orbit_names.join(", "),
                per_orbit.len()
            )));
        }
        if let Some(v) = per_orbit.iter().find(|&&v| !(v >= 0.5)) {
            return Err(Error::InvalidMultiplicity(format!(
                "multiplicity {v} violates k >= 1/2"
            )));
        }
        Ok(MultiplicityFunction { per_orbit })
    }

    pub fn uniform(system: &RootSystem, k: f64) -> Result<Self> {
        Self::new(system, vec![k; system.n_orbits()])
    }

    pub fn value(&self, system: &RootSystem, root: usize) -> f64 {
        self.per_orbit[system.orbit_of[root]]
    }

    pub fn per_orbit(&self) -> &[f64] {
        &self.per_orbit
    }
}

/// ρ = ½ Σ_{α>0} k_α α.
pub fn rho(system: &RootSystem, k: &MultiplicityFunction) -> Point {
    let mut out = linalg::zeros(system.rank);
    for i in 0..system.n_positive {
        linalg::axpy(&mut out, 0.5 * k.value(system, i), &system.roots[i]);
    }
    out
}

/// One Weyl group element: a reduced word in the simple generators, its
/// orthogonal matrix, and its exact action on the root list.
#[derive(Clone, Debug)]
pub struct WeylElement {
    pub word: Vec<usize>,
    pub matrix: Matrix,
    pub perm: Vec<usize>,
}

impl WeylElement {
    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Compact word rendering, `e` for the identity.
    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "e".into()
        } else {
            self.word.iter().map(|g| g.to_string()).collect::<Vec<_>>().join("-")
        }
    }
}

/// The full Weyl group in breadth-first order from the identity (shortest
/// word first, lexicographic among equals), with a composition table.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    pub elements: Vec<WeylElement>,
    perm_index: HashMap<Vec<usize>, usize>,
    cayley: Vec<u32>,
    pub inverse: Vec<usize>,
    /// Element index realizing r_α for each positive root α.
    pub reflection_elem: Vec<usize>,
    /// Positive-root index for each element that is a root reflection.
    reflection_root: HashMap<usize, usize>,
}

pub const DEFAULT_GROUP_CAP: usize = 100_000;

impl WeylGroup {
    pub fn generate(system: &RootSystem) -> Result<Self> {
        Self::generate_capped(system, DEFAULT_GROUP_CAP)
    }

    pub fn generate_capped(system: &RootSystem, cap: usize) -> Result<Self> {
        let n_roots = system.roots.len();
        let gens: Vec<(usize, Matrix, Vec<usize>)> = system
            .simple
            .iter()
            .map(|&s| {
                let m = Matrix::reflection(&system.roots[s]);
                let perm: Vec<usize> = (0..n_roots)
                    .map(|r| {
                        system
                            .find_root(&system.reflect_index(s, &system.roots[r]))
                            .expect("reflection closure")
                    })
                    .collect();
                (s, m, perm)
            })
            .collect();

        let identity = WeylElement {
            word: Vec::new(),
            matrix: Matrix::identity(system.rank),
            perm: (0..n_roots).collect(),
        };
        let mut elements = vec![identity];
        let mut perm_index: HashMap<Vec<usize>, usize> = HashMap::new();
        perm_index.insert(elements[0].perm.clone(), 0);
        let mut frontier = VecDeque::from([0usize]);
        while let Some(cur) = frontier.pop_front() {
            for (g, (_, gm, gp)) in gens.iter().enumerate() {
                // New element acts as x ↦ cur(r_g(x)).
                let perm: Vec<usize> = (0..n_roots).map(|r| elements[cur].perm[gp[r]]).collect();
                if perm_index.contains_key(&perm) {
                    continue;
                }
                let mut word = elements[cur].word.clone();
                word.push(g);
                let matrix = elements[cur].matrix.mul(gm);
                perm_index.insert(perm.clone(), elements.len());
                elements.push(WeylElement { word, matrix, perm });
                frontier.push_back(elements.len() - 1);
                if elements.len() > cap {
                    return Err(Error::GroupTooLarge { cap });
                }
            }
        }

        let size = elements.len();
        let mut cayley = vec![0u32; size * size];
        for i in 0..size {
            for j in 0..size {
                let comp: Vec<usize> =
                    (0..n_roots).map(|r| elements[i].perm[elements[j].perm[r]]).collect();
                cayley[i * size + j] = perm_index[&comp] as u32;
            }
        }
        let mut inverse = vec![0usize; size];
        for i in 0..size {
            for j in 0..size {
                if cayley[i * size + j] == 0 {
                    inverse[i] = j;
                    break;
                }
            }
        }
        let mut reflection_elem = Vec::with_capacity(system.n_positive);
        let mut reflection_root = HashMap::new();
        for a in 0..system.n_positive {
            let perm: Vec<usize> = (0..n_roots)
                .map(|r| {
                    system
                        .find_root(&system.reflect_index(a, &system.roots[r]))
                        .expect("reflection closure")
                })
                .collect();
            let idx = *perm_index
                .get(&perm)
                .ok_or_else(|| Error::InvalidSystem(format!("reflection {a} not in group")))?;
            reflection_elem.push(idx);
            reflection_root.entry(idx).or_insert(a);
        }

        Ok(WeylGroup { elements, perm_index, cayley, inverse, reflection_elem, reflection_root })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of elements[i] ∘ elements[j] (apply j first).
    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.cayley[i * self.elements.len() + j] as usize
    }

    pub fn apply(&self, i: usize, x: &[f64]) -> Point {
        self.elements[i].matrix.apply(x)
    }

    pub fn apply_inverse(&self, i: usize, x: &[f64]) -> Point {
        self.elements[i].matrix.apply_transpose(x)
    }

    /// Positive root whose reflection equals the given element, if any.
    pub fn as_reflection(&self, element: usize) -> Option<usize> {
        self.reflection_root.get(&element).copied()
    }

    pub fn index_of_perm(&self, perm: &[usize]) -> Option<usize> {
        self.perm_index.get(perm).copied()
    }
}

/// Result of the decomposition x = w·x^W.
#[derive(Clone, Debug)]
pub struct ChamberDecomposition {
    pub radial: Point,
    /// Index into `WeylGroup::elements` (breadth-first order); for wall points
    /// this is the first element in that order mapping the radial point to x.
    pub angular: usize,
    pub is_regular: bool,
}

/// Decompose x into its radial part (in the closed positive chamber) and the
/// angular Weyl element carrying the radial part to x.
pub fn radial_decompose(system: &RootSystem, group: &WeylGroup, x: &[f64]) -> ChamberDecomposition {
    let scale = 1.0 + linalg::norm(x);
    let tol = 1e-9 * scale;
    let mut best: Option<(usize, Point, f64)> = None;
    for (i, w) in group.elements.iter().enumerate() {
        let y = w.matrix.apply_transpose(x);
        let min_pair =
            (0..system.n_positive).map(|a| system.pairing(a, &y)).fold(f64::INFINITY, f64::min);
        if min_pair >= -tol {
            let is_regular = min_pair > tol;
            return ChamberDecomposition { radial: y, angular: i, is_regular };
        }
        match best {
            Some((_, _, b)) if b >= min_pair => {}
            _ => best = Some((i, y, min_pair)),
        }
    }
    // Numerically unreachable: W covers the space. Fall back to the best
    // candidate rather than panicking on accumulated round-off.
    let (angular, radial, _) = best.expect("nonempty Weyl group");
    ChamberDecomposition { radial, angular, is_regular: false }
}

/// Serialized form of a root system plus multiplicity data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemDocument {
    pub family: Family,
    pub rank: usize,
    pub normalization: Normalization,
    pub roots: Vec<Vec<f64>>,
    pub k: BTreeMap<String, f64>,
}

pub fn to_document(system: &RootSystem, k: &MultiplicityFunction) -> SystemDocument {
    SystemDocument {
        family: system.family,
        rank: system.rank,
        normalization: system.normalization,
        roots: system.roots.iter().map(|r| r.to_vec()).collect(),
        k: system
            .orbit_names
            .iter()
            .cloned()
            .zip(k.per_orbit().iter().copied())
            .collect(),
    }
}

pub fn from_document(doc: &SystemDocument) -> Result<(RootSystem, MultiplicityFunction)> {
    let system = RootSystem::build(doc.family, doc.rank, doc.normalization)?;
    if !doc.roots.is_empty() {
        if doc.roots.len() != system.roots.len() {
            return Err(Error::InvalidSystem("root list length mismatch in document".into()));
        }
        for r in &doc.roots {
            if system.find_root(r).is_none() {
                return Err(Error::InvalidSystem(format!("document root {r:?} not in system")));
            }
        }
    }
    let mut per_orbit = vec![f64::NAN; system.n_orbits()];
    for (name, &v) in &doc.k {
        let idx = system
            .orbit_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidMultiplicity(format!("unknown orbit '{name}'")))?;
        per_orbit[idx] = v;
    }
    if per_orbit.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidMultiplicity("missing orbit value in document".into()));
    }
    let k = MultiplicityFunction::new(&system, per_orbit)?;
    Ok((system, k))
}
