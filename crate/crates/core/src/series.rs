//! Truncated power series in z^2 for the symbol deviations and gap functions.
//!
//! Everything the Fourier analysis needs is built from sin^2(z/2), sin(z)/z and
//! the geometric sums of q = (2/3) sin^2(z/2). Near z = 0 the printed closed
//! forms subtract O(1) quantities to produce O(z^4) results; evaluating the
//! same expressions as series in z^2 keeps full relative precision down to the
//! root windows at large Peclet number, where the quantities of interest are
//! smaller than one ulp of the operands.

/// Number of retained z^2 coefficients. With |z| <= RADIUS the dropped tail is
/// below 1e-26 of the leading term (ratio z^2/6 per order).
const LEN: usize = 24;

/// Closed forms are preferred outside this radius; series inside.
pub(crate) const RADIUS: f64 = 0.7;

#[derive(Clone, Copy)]
pub(crate) struct Series([f64; LEN]);

impl Series {
    fn zero() -> Self {
        Series([0.0; LEN])
    }

    fn constant(c: f64) -> Self {
        let mut s = Self::zero();
        s.0[0] = c;
        s
    }

    fn add(&self, other: &Series) -> Series {
        let mut out = Self::zero();
        for k in 0..LEN {
            out.0[k] = self.0[k] + other.0[k];
        }
        out
    }

    fn mul(&self, other: &Series) -> Series {
        let mut out = Self::zero();
        for i in 0..LEN {
            if self.0[i] == 0.0 {
                continue;
            }
            for j in 0..LEN - i {
                out.0[i + j] += self.0[i] * other.0[j];
            }
        }
        out
    }

    fn scale(&self, c: f64) -> Series {
        let mut out = *self;
        for v in out.0.iter_mut() {
            *v *= c;
        }
        out
    }

    /// Horner evaluation at z^2.
    pub(crate) fn eval(&self, z2: f64) -> f64 {
        let mut acc = 0.0;
        for k in (0..LEN).rev() {
            acc = acc * z2 + self.0[k];
        }
        acc
    }
}

/// sin^2(z/2) = sum_{k>=1} (-1)^(k+1) z^(2k) / (2 (2k)!).
fn sin_half_sq() -> Series {
    let mut s = Series::zero();
    let mut inv_fact = 1.0f64; // 1/(2k)! accumulated
    for k in 1..LEN {
        inv_fact /= ((2 * k - 1) * (2 * k)) as f64;
        s.0[k] = if k % 2 == 1 { 0.5 * inv_fact } else { -0.5 * inv_fact };
    }
    s
}

/// sin(z)/z = sum_{k>=0} (-1)^k z^(2k) / (2k+1)!.
fn sinc() -> Series {
    let mut s = Series::zero();
    let mut inv_fact = 1.0f64;
    for k in 0..LEN {
        if k > 0 {
            inv_fact /= ((2 * k) * (2 * k + 1)) as f64;
        }
        s.0[k] = if k % 2 == 0 { inv_fact } else { -inv_fact };
    }
    s
}

/// 4 sin^2(z/2)/z^2 = sinc(z/2)^2 = sum_{k>=0} (-1)^k 2 z^(2k) / (2k+2)!.
fn sinc_half_sq() -> Series {
    let mut s = Series::zero();
    let mut inv_fact = 0.5f64; // 1/(2k+2)! starting at 1/2!
    for k in 0..LEN {
        if k > 0 {
            inv_fact /= ((2 * k + 1) * (2 * k + 2)) as f64;
        }
        s.0[k] = if k % 2 == 0 { 2.0 * inv_fact } else { -2.0 * inv_fact };
    }
    s
}

/// The series bundle the symbol and gap evaluations draw from.
pub(crate) struct SymbolSeries {
    q: Series,
    sigma: Series,
    c: Series,
}

impl SymbolSeries {
    pub(crate) fn new() -> Self {
        SymbolSeries {
            q: sin_half_sq().scale(2.0 / 3.0),
            sigma: sinc(),
            c: sinc_half_sq(),
        }
    }

    fn q_pow(&self, k: usize) -> Series {
        let mut acc = Series::constant(1.0);
        for _ in 0..k {
            acc = acc.mul(&self.q);
        }
        acc
    }

    /// S_k = sum_{j=0}^{k-1} q^j. Powers beyond the truncation order drop out.
    fn partial_geometric(&self, k: usize) -> Series {
        let mut acc = Series::zero();
        let mut term = Series::constant(1.0);
        for j in 0..k.min(LEN) {
            if j > 0 {
                term = term.mul(&self.q);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// G = 1/(1 - q) within truncation order.
    fn geometric(&self) -> Series {
        self.partial_geometric(LEN)
    }

    /// 1 - c(z) S_k(z): the relative deviation of the diffusive symbol part.
    pub(crate) fn diffusive_deviation(&self, terms: usize, z2: f64) -> f64 {
        let cs = self.c.mul(&self.partial_geometric(terms));
        Series::constant(1.0).add(&cs.scale(-1.0)).eval(z2)
    }

    /// 1 - sigma(z) S_k(z): the relative deviation of the convective symbol part.
    pub(crate) fn convective_deviation(&self, terms: usize, z2: f64) -> f64 {
        let ss = self.sigma.mul(&self.partial_geometric(terms));
        Series::constant(1.0).add(&ss.scale(-1.0)).eval(z2)
    }

    /// Same two deviations with the full geometric sum (consistent scheme).
    pub(crate) fn diffusive_deviation_consistent(&self, z2: f64) -> f64 {
        let cg = self.c.mul(&self.geometric());
        Series::constant(1.0).add(&cg.scale(-1.0)).eval(z2)
    }

    pub(crate) fn convective_deviation_consistent(&self, z2: f64) -> f64 {
        let sg = self.sigma.mul(&self.geometric());
        Series::constant(1.0).add(&sg.scale(-1.0)).eval(z2)
    }

    /// The two bracketed factors of f_n: E_d = 2 c S_{n+2} - 2 - c q^(n+1)
    /// and E_c = 2 sigma S_{n+2} - 2 - sigma q^(n+1), evaluated at z^2.
    pub(crate) fn gap_brackets(&self, n: usize, z2: f64) -> (f64, f64) {
        let s = self.partial_geometric(n + 2);
        let qn1 = self.q_pow(n + 1);
        let e_d = self
            .c
            .mul(&s)
            .scale(2.0)
            .add(&Series::constant(-2.0))
            .add(&self.c.mul(&qn1).scale(-1.0));
        let e_c = self
            .sigma
            .mul(&s)
            .scale(2.0)
            .add(&Series::constant(-2.0))
            .add(&self.sigma.mul(&qn1).scale(-1.0));
        (e_d.eval(z2), e_c.eval(z2))
    }

    /// Same brackets for g_n, where every sum is the full geometric one:
    /// E_d = 2 c G - 2 - c G q^(n+1), E_c = 2 sigma G - 2 - sigma G q^(n+1).
    pub(crate) fn gap_brackets_consistent(&self, n: usize, z2: f64) -> (f64, f64) {
        let g = self.geometric();
        let gq = g.mul(&self.q_pow(n + 1));
        let e_d = self
            .c
            .mul(&g)
            .scale(2.0)
            .add(&Series::constant(-2.0))
            .add(&self.c.mul(&gq).scale(-1.0));
        let e_c = self
            .sigma
            .mul(&g)
            .scale(2.0)
            .add(&Series::constant(-2.0))
            .add(&self.sigma.mul(&gq).scale(-1.0));
        (e_d.eval(z2), e_c.eval(z2))
    }
}
