//! Complexes of free modules in degrees 0..3 and the Selmer kernel of a chain map.

use serde::{Serialize, Serializer};

use super::ring::{Euclidean, Pid};
use super::snf::{field_rank, smith, Matrix, Smith};
use super::SelmerError;

/// R^{n0} -> R^{n1} -> R^{n2} -> R^{n3}; d[i] has shape n_{i+1} x n_i.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeComplex<R> {
    pub ranks: [usize; 4],
    pub d: [Matrix<R>; 3],
}

impl<R: Euclidean> FreeComplex<R> {
    pub fn new(ranks: [usize; 4], d: [Matrix<R>; 3]) -> Result<Self, SelmerError> {
        for (i, m) in d.iter().enumerate() {
            if m.rows() != ranks[i + 1] || m.cols() != ranks[i] {
                return Err(SelmerError::Shape(format!(
                    "d{i} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    ranks[i + 1],
                    ranks[i]
                )));
            }
        }
        for i in 0..2 {
            if !d[i + 1].mul(&d[i]).is_zero() {
                return Err(SelmerError::NotAComplex(i));
            }
        }
        Ok(FreeComplex { ranks, d })
    }

    /// d_i, with zero maps outside 0..3.
    pub fn differential(&self, i: i64) -> Matrix<R> {
        match i {
            0..=2 => self.d[i as usize].clone(),
            -1 => Matrix::zero(self.ranks[0], 0),
            3 => Matrix::zero(0, self.ranks[3]),
            _ => unreachable!(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohomologySummary<R> {
    pub free_rank: usize,
    /// non-unit invariant factors, a divisibility chain
    pub torsion: Vec<R>,
}

impl<R: Euclidean> CohomologySummary<R> {
    /// rank over R/f of M[f]
    pub fn f_torsion_rank(&self, f: &R) -> usize {
        self.torsion.iter().filter(|e| f.divides(e)).count()
    }

    fn from_smith(generators: usize, s: &Smith<R>) -> Self {
        CohomologySummary { free_rank: generators - s.rank, torsion: s.torsion() }
    }
}

impl<R: Euclidean> Serialize for CohomologySummary<R> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CohomologySummary", 2)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        st.serialize_field("torsion", &self.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>())?;
        st.end()
    }
}

/// H^i = ker d_i / im d_{i-1}.
pub fn cohomology<R: Euclidean>(c: &FreeComplex<R>, i: usize) -> Result<CohomologySummary<R>, SelmerError> {
    if i > 3 {
        return Err(SelmerError::Degree(i));
    }
    let out = smith(&c.differential(i as i64)).rank;
    let inc = smith(&c.differential(i as i64 - 1));
    // ker d_i is saturated, so the torsion of ker/im is the torsion of R^n/im
    Ok(CohomologySummary { free_rank: c.ranks[i] - out - inc.rank, torsion: inc.torsion() })
}

/// V, V' and a chain map phi: V -> V' inducing u: H^1(V) -> H^1(V').
#[derive(Clone, Debug, PartialEq)]
pub struct SelmerInstance<R> {
    pub source: FreeComplex<R>,
    pub target: FreeComplex<R>,
    /// phi[i] has shape n'_i x n_i
    pub chain: [Matrix<R>; 4],
}

impl<R: Euclidean> SelmerInstance<R> {
    pub fn new(source: FreeComplex<R>, target: FreeComplex<R>, chain: [Matrix<R>; 4]) -> Result<Self, SelmerError> {
        for (i, m) in chain.iter().enumerate() {
            if m.rows() != target.ranks[i] || m.cols() != source.ranks[i] {
                return Err(SelmerError::Shape(format!("chain map in degree {i} has the wrong shape")));
            }
        }
        for i in 0..3 {
            if chain[i + 1].mul(&source.d[i]) != target.d[i].mul(&chain[i]) {
                return Err(SelmerError::NotAChainMap(i));
            }
        }
        Ok(SelmerInstance { source, target, chain })
    }
}

/// S(V) = W / B^1 with W = {x in Z^1 : phi(x) in B'^1}.
#[derive(Clone, Debug)]
pub struct SelmerData<R> {
    /// basis of W, n1 x w
    pub w_basis: Matrix<R>,
    /// D0 = W_basis * c
    pub c: Matrix<R>,
    pub selmer: CohomologySummary<R>,
    pub h2: CohomologySummary<R>,
    /// H^1(V') / u(H^1(V))
    pub coker_u: CohomologySummary<R>,
}

fn exact_div<R: Euclidean>(x: &R, d: &R) -> Result<R, SelmerError> {
    let (q, r) = x.div_rem(d);
    if r.is_zero() { Ok(q) } else { Err(SelmerError::Internal(format!("{x} is not divisible by {d}"))) }
}

/// Coordinates of the columns of `x` in the kernel basis of `sm` (which must contain them).
fn kernel_coords<R: Euclidean>(sm: &Smith<R>, x: &Matrix<R>) -> Result<Matrix<R>, SelmerError> {
    let y = sm.v_inv.mul(x);
    if !y.select_rows(0..sm.rank).is_zero() {
        return Err(SelmerError::Internal("vector outside the kernel".into()));
    }
    Ok(y.select_rows(sm.rank..y.rows()))
}

pub fn selmer_data<R: Euclidean>(inst: &SelmerInstance<R>) -> Result<SelmerData<R>, SelmerError> {
    let (v, t) = (&inst.source, &inst.target);
    let phi1 = &inst.chain[1];
    let s1 = smith(&v.d[1]);
    let k = s1.kernel();
    let c0 = kernel_coords(&s1, &v.d[0])?;

    // a with phi1 K a in im D0'
    let g = phi1.mul(&k).hstack(&t.d[0].neg());
    let kg = smith(&g).kernel();
    let a = kg.select_rows(0..k.cols());
    let sa = smith(&a);
    let w = sa.rank;
    let w_basis = k.mul(&sa.image());
    // U_A c0 = [diag(d) C; 0]
    let uc = sa.u.mul(&c0);
    if !uc.select_rows(w..uc.rows()).is_zero() {
        return Err(SelmerError::Internal("boundaries are not inside W".into()));
    }
    let mut c = Matrix::zero(w, c0.cols());
    for i in 0..w {
        for j in 0..c0.cols() {
            c.set(i, j, exact_div(uc.get(i, j), &sa.diag[i])?);
        }
    }
    let selmer = CohomologySummary::from_smith(w, &smith(&c));
    let h2 = cohomology(v, 2)?;

    let s1t = smith(&t.d[1]);
    let gens = kernel_coords(&s1t, &t.d[0].hstack(&phi1.mul(&k)))?;
    let coker_u = CohomologySummary::from_smith(gens.rows(), &smith(&gens));
    Ok(SelmerData { w_basis, c, selmer, h2, coker_u })
}

/// S(V) with its generic rank r = free_rank.
pub fn selmer_kernel<R: Euclidean>(inst: &SelmerInstance<R>) -> Result<CohomologySummary<R>, SelmerError> {
    Ok(selmer_data(inst)?.selmer)
}

/// [D1 0; phi1 -D0']: its kernel projects onto W.
fn w_system<R: Euclidean>(inst: &SelmerInstance<R>) -> Matrix<R> {
    let (v, t) = (&inst.source, &inst.target);
    let top = v.d[1].hstack(&Matrix::zero(v.ranks[2], t.ranks[0]));
    let bottom = inst.chain[1].hstack(&t.d[0].neg());
    top.vstack(&bottom)
}

/// The instance reduced modulo f, and dimensions over R/f.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Specialization {
    pub prime: String,
    /// dim H^0(V'/fV')
    pub h0_target: usize,
    pub dim_selmer: usize,
}

/// dim S(V/fV) by elimination over R/f.
pub fn specialize<R: Pid>(inst: &SelmerInstance<R>, f: &R) -> Result<Specialization, SelmerError> {
    R::check_prime(f)?;
    let (v, t) = (&inst.source, &inst.target);
    let m = w_system(inst);
    let nul = |a: &Matrix<R>| a.cols() - field_rank(&a.reduce(f));
    let h0_target = nul(&t.d[0]);
    let dim_w = nul(&m) - h0_target;
    let dim_selmer = dim_w - field_rank(&v.d[0].reduce(f));
    Ok(Specialization { prime: f.to_string(), h0_target, dim_selmer })
}

/// The same numbers read off from Smith forms over R: rank mod f counts invariant
/// factors prime to f. Independent of the elimination in `specialize`.
#[derive(Clone, Debug)]
pub struct SmithPredictor<R> {
    m: Smith<R>,
    m_cols: usize,
    d0: Smith<R>,
    d0t: Smith<R>,
    d0t_cols: usize,
}

impl<R: Euclidean> SmithPredictor<R> {
    pub fn new(inst: &SelmerInstance<R>) -> Self {
        let m = w_system(inst);
        SmithPredictor {
            m_cols: m.cols(),
            m: smith(&m),
            d0: smith(&inst.source.d[0]),
            d0t: smith(&inst.target.d[0]),
            d0t_cols: inst.target.ranks[0],
        }
    }

    pub fn h0_target(&self, f: &R) -> usize {
        self.d0t_cols - self.d0t.rank_mod(f)
    }

    pub fn dim_selmer(&self, f: &R) -> usize {
        (self.m_cols - self.m.rank_mod(f)) - self.h0_target(f) - self.d0.rank_mod(f)
    }

    /// Nonzero invariant factors involved; every prime where the numbers move divides one of them.
    pub fn invariant_factors(&self) -> Vec<R> {
        [&self.m, &self.d0, &self.d0t].iter().flat_map(|s| s.diag[..s.rank].iter().cloned()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Form1Report {
    PreconditionFailed { prime: String, h0_target: usize },
    Checked {
        prime: String,
        /// dim S(V) (x) R/f
        dim_tensor: usize,
        dim_selmer_f: usize,
        injective: bool,
        cokernel_dim: usize,
        h2_f_torsion: usize,
        coker_u_f_torsion: usize,
        bound_holds: bool,
    },
}

impl Form1Report {
    pub fn ok(&self) -> bool {
        match self {
            Form1Report::PreconditionFailed { .. } => true,
            Form1Report::Checked { injective, bound_holds, .. } => *injective && *bound_holds,
        }
    }
}

/// Injectivity of S(V)/f -> S(V/fV) and the bound on its cokernel.
pub fn form1_check<R: Pid>(inst: &SelmerInstance<R>, f: &R) -> Result<Form1Report, SelmerError> {
    let data = selmer_data(inst)?;
    form1_with(inst, &data, f)
}

fn form1_with<R: Pid>(inst: &SelmerInstance<R>, data: &SelmerData<R>, f: &R) -> Result<Form1Report, SelmerError> {
    let sp = specialize(inst, f)?;
    if sp.h0_target != 0 {
        return Ok(Form1Report::PreconditionFailed { prime: f.to_string(), h0_target: sp.h0_target });
    }
    let w = data.w_basis.cols();
    let dim_tensor = w - field_rank(&data.c.reduce(f));
    // image of S(V)/f in k^{n1}/im D0 is (im W_f)/(im D0_f) since D0 = W C
    let image = field_rank(&data.w_basis.reduce(f)) - field_rank(&inst.source.d[0].reduce(f));
    let injective = image == dim_tensor;
    let cokernel_dim = sp.dim_selmer - image;
    let h2_f_torsion = data.h2.f_torsion_rank(f);
    let coker_u_f_torsion = data.coker_u.f_torsion_rank(f);
    Ok(Form1Report::Checked {
        prime: f.to_string(),
        dim_tensor,
        dim_selmer_f: sp.dim_selmer,
        injective,
        cokernel_dim,
        h2_f_torsion,
        coker_u_f_torsion,
        bound_holds: cokernel_dim <= h2_f_torsion + coker_u_f_torsion,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemicontinuityRow {
    pub prime: String,
    pub dim_selmer_f: usize,
    /// H^0(V'/fV') = 0
    pub hypothesis: bool,
    pub predicted_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemicontinuityReport {
    pub generic_rank: usize,
    pub rows: Vec<SemicontinuityRow>,
    /// primes (with the hypothesis) where dim S(V/fV) != r
    pub observed_exceptional: Vec<String>,
    /// the same set from Smith invariants
    pub predicted_exceptional: Vec<String>,
    /// primes dividing torsion of S(V), H^2(V) or coker u
    pub divisor_bound: Vec<String>,
    pub lower_bound_holds: bool,
    pub prediction_matches: bool,
    pub within_divisor_bound: bool,
    /// S(V) torsion-free: then the bound set uses only H^2(V) and coker u
    pub selmer_torsion_free: bool,
}

impl SemicontinuityReport {
    pub fn ok(&self) -> bool {
        self.lower_bound_holds && self.prediction_matches && self.within_divisor_bound
    }
}

pub fn semicontinuity_experiment<R: Pid>(inst: &SelmerInstance<R>, primes: &[R]) -> Result<SemicontinuityReport, SelmerError> {
    let data = selmer_data(inst)?;
    let r = data.selmer.free_rank;
    let pred = SmithPredictor::new(inst);
    let mut rows = Vec::with_capacity(primes.len());
    let mut observed = Vec::new();
    let mut predicted = Vec::new();
    let mut bound = Vec::new();
    let mut lower = true;
    for f in primes {
        let sp = specialize(inst, f)?;
        let hyp = sp.h0_target == 0;
        let pd = pred.dim_selmer(f);
        if hyp {
            lower &= sp.dim_selmer >= r;
            if sp.dim_selmer != r {
                observed.push(f.to_string());
            }
            if pd != r || pred.h0_target(f) != 0 {
                predicted.push(f.to_string());
            }
        }
        let divides_any = |m: &CohomologySummary<R>| m.f_torsion_rank(f) > 0;
        if divides_any(&data.selmer) || divides_any(&data.h2) || divides_any(&data.coker_u) {
            bound.push(f.to_string());
        }
        rows.push(SemicontinuityRow { prime: f.to_string(), dim_selmer_f: sp.dim_selmer, hypothesis: hyp, predicted_dim: pd });
    }
    let within = observed.iter().all(|f| bound.contains(f));
    Ok(SemicontinuityReport {
        generic_rank: r,
        prediction_matches: observed == predicted,
        within_divisor_bound: within,
        selmer_torsion_free: data.selmer.torsion.is_empty(),
        rows,
        observed_exceptional: observed,
        predicted_exceptional: predicted,
        divisor_bound: bound,
        lower_bound_holds: lower,
    })
}
