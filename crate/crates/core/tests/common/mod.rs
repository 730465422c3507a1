//! Dense-matrix reference simulator built from Kronecker products and the
//! matrix exponential. Shares nothing numeric with the fast paths.

#![allow(dead_code)]

use lyapunov_maxcut::dynamics::{bfs_order, Ansatz, RunConfig};
use lyapunov_maxcut::graph::Graph;
use lyapunov_maxcut::quantum::{ObservableTerms, Pauli, PauliString, StateVector};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type Mat = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single(p: Option<Pauli>) -> Mat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match p {
        None => Mat::from_row_slice(2, 2, &[o, z, z, o]),
        Some(Pauli::X) => Mat::from_row_slice(2, 2, &[z, o, o, z]),
        Some(Pauli::Y) => Mat::from_row_slice(2, 2, &[z, -I, I, z]),
        Some(Pauli::Z) => Mat::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Qubit `j` is bit `j` of the basis index, so qubit `n - 1` is the
/// leftmost Kronecker factor.
pub fn pauli_matrix(ops: &[(usize, Pauli)], n: usize) -> Mat {
    let mut m = Mat::identity(1, 1);
    for q in (0..n).rev() {
        let p = ops.iter().find(|(j, _)| *j == q).map(|(_, p)| *p);
        m = m.kronecker(&single(p));
    }
    m
}

pub fn string_matrix(s: &PauliString, n: usize) -> Mat {
    pauli_matrix(&s.ops(), n)
}

pub fn terms_matrix(terms: &ObservableTerms, n: usize) -> Mat {
    let dim = 1 << n;
    let mut m = Mat::zeros(dim, dim);
    for t in terms.terms() {
        m += string_matrix(&t.string, n) * c(t.coefficient, 0.0);
    }
    m
}

/// `Σ_{(u,v)} (I - Z_u Z_v) / 2`.
pub fn maxcut_matrix(g: &Graph) -> Mat {
    let n = g.n();
    let dim = 1 << n;
    let id = Mat::identity(dim, dim);
    let mut m = Mat::zeros(dim, dim);
    for &(u, v) in g.edges() {
        let zz = pauli_matrix(&[(u, Pauli::Z), (v, Pauli::Z)], n);
        m += (&id - zz) * c(0.5, 0.0);
    }
    m
}

/// `exp(-i θ M)`.
pub fn expm(m: &Mat, theta: f64) -> Mat {
    (m * c(0.0, -theta)).exp()
}

pub fn to_vector(s: &StateVector) -> Vector {
    Vector::from_column_slice(s.amplitudes())
}

pub fn plus(n: usize) -> Vector {
    let dim = 1 << n;
    Vector::from_element(dim, c(1.0 / (dim as f64).sqrt(), 0.0))
}

pub fn expect(psi: &Vector, m: &Mat) -> f64 {
    psi.dotc(&(m * psi)).re
}

/// `<ψ| i (A H - H A) |ψ>`.
pub fn commutator_expectation(psi: &Vector, a: &Mat, h: &Mat) -> f64 {
    let comm = (a * h - h * a) * I;
    psi.dotc(&(comm * psi)).re
}

pub fn max_abs_diff(a: &Vector, b: &Vector) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn x_sum(n: usize) -> Mat {
    let mut m = Mat::zeros(1 << n, 1 << n);
    for q in 0..n {
        m += pauli_matrix(&[(q, Pauli::X)], n);
    }
    m
}

/// Per-step values of a dense rerun of the feedback loop.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub o: f64,
    pub hf: f64,
    pub state: Vector,
    pub lambda: f64,
    pub two_param: f64,
}

/// Dense version of the feedback loop at fixed `dt`; trackers use
/// `<Q> = m` and `<Q> = m - <H_f>` with unit weights.
pub fn dense_run(g: &Graph, cfg: &RunConfig, steps: usize) -> Vec<DenseStep> {
    let n = g.n();
    let m = g.m() as f64;
    let h = maxcut_matrix(g);
    let (mixer, yz): (Mat, Vec<(usize, usize)>) = match cfg.ansatz {
        Ansatz::QaoaFeedback => (x_sum(n), vec![]),
        Ansatz::LightCone => {
            let order = bfs_order(g, 0).expect("connected");
            let mut a = Mat::zeros(1 << n, 1 << n);
            for &(j, k) in &order.oriented_edges {
                a += pauli_matrix(&[(j, Pauli::Y), (k, Pauli::Z)], n);
            }
            (a, order.oriented_edges)
        }
    };
    let yz_mats: Vec<Mat> = yz.iter().map(|&(j, k)| pauli_matrix(&[(j, Pauli::Y), (k, Pauli::Z)], n)).collect();
    let phase = expm(&h, cfg.dt / m);

    let mut psi = plus(n);
    let mut o = commutator_expectation(&psi, &mixer, &h);
    let mut hf = expect(&psi, &h);
    let (mut lambda, mut x, mut y) = (0.0, 1.0, 0.0);
    let mut frozen = false;
    let mut out = Vec::new();
    for p in 1..=steps {
        let t = (p - 1) as f64 * cfg.dt;
        let beta = cfg.beta.value(t, cfg.rounds, cfg.dt);
        let coeff = match cfg.ansatz {
            Ansatz::LightCone if !cfg.lightcone_feedback => beta,
            _ => beta * o,
        };
        let drive = (coeff * o).max(0.0);
        lambda += drive * cfg.dt / m;
        let q2 = m - hf;
        let denom = q2 - drive * cfg.dt;
        if !frozen && q2 > 0.0 && denom > 0.0 {
            let (nx, ny) = (x * q2 / denom, y + x * drive * cfg.dt / denom);
            x = nx;
            y = ny;
        } else {
            frozen = true;
        }
        match cfg.ansatz {
            Ansatz::QaoaFeedback => {
                psi = expm(&mixer, coeff * cfg.dt) * (&phase * psi);
            }
            Ansatz::LightCone => {
                for mat in &yz_mats {
                    psi = expm(mat, coeff * cfg.dt) * psi;
                }
            }
        }
        hf = expect(&psi, &h);
        o = commutator_expectation(&psi, &mixer, &h);
        out.push(DenseStep { o, hf, state: psi.clone(), lambda, two_param: y / x });
    }
    out
}
