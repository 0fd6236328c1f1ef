use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::polyalg::{multi_indices, HomPoly, MultiIndex, RationalMatrix};
use crate::potential::PotentialSymbol;

/// Coordinates `(ν, α)`, `|α| = k`, of symmetric `k`-jets of `U`-valued maps,
/// with the `N × n` matrix representation `Ψ(X)[(ν,β), i] = X_{ν, β+e_i}`.
#[derive(Clone, Debug)]
pub struct JetSpace {
    pub n: usize,
    pub k: u32,
    pub dim_u: usize,
    pub coordinates: Vec<(usize, MultiIndex)>,
    /// Row labels `(ν, β)`, `|β| = k - 1`, of `Ψ`.
    pub psi_rows: Vec<(usize, MultiIndex)>,
    index: HashMap<(usize, MultiIndex), usize>,
}

impl JetSpace {
    pub fn new(n: usize, k: u32, dim_u: usize) -> Result<Self> {
        if n == 0 || k == 0 || dim_u == 0 {
            return Err(Error::InvalidParameter("jet space needs n, k, dim U >= 1".into()));
        }
        let alphas = multi_indices(n, k);
        let betas = multi_indices(n, k - 1);
        let coordinates: Vec<(usize, MultiIndex)> =
            (0..dim_u).flat_map(|nu| alphas.iter().map(move |a| (nu, a.clone()))).collect();
        let psi_rows = (0..dim_u).flat_map(|nu| betas.iter().map(move |b| (nu, b.clone()))).collect();
        let index = coordinates.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        Ok(JetSpace { n, k, dim_u, coordinates, psi_rows, index })
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }

    /// Row count `N` of the matrix representation.
    pub fn big_n(&self) -> usize {
        self.psi_rows.len()
    }

    /// Jet coordinate sitting at `Ψ[row, col]`.
    pub fn psi_coordinate(&self, row: usize, col: usize) -> usize {
        let (nu, beta) = &self.psi_rows[row];
        self.index[&(*nu, beta.plus_unit(col))]
    }

    /// `Ψ(L y)` for a linear map `L` from some parameter space into jets,
    /// as a matrix of linear forms in the parameters.
    pub fn psi_forms(&self, l: &RationalMatrix) -> Vec<Vec<HomPoly>> {
        let forms: Vec<HomPoly> = (0..l.rows()).map(|c| HomPoly::linear(l.row(c))).collect();
        (0..self.big_n())
            .map(|r| (0..self.n).map(|i| forms[self.psi_coordinate(r, i)].clone()).collect())
            .collect()
    }
}

/// `T ∈ Lin(⊙^k(ℝⁿ, U), V)` with `B = T ∘ D^k`, together with the
/// projection `T̂` onto a complement of `ker T` and the right inverse `ĵ`.
#[derive(Clone, Debug)]
pub struct JetLinearMap {
    pub jet: JetSpace,
    pub t: RationalMatrix,
    pub t_hat: RationalMatrix,
    pub j_hat: RationalMatrix,
    pub rank: usize,
    pub surjective: bool,
}

impl JetLinearMap {
    /// Orthogonal complement: `T̂ = T†T`, `ĵ = T†`.
    pub fn new(jet: JetSpace, t: RationalMatrix) -> Self {
        let pinv = t.pseudoinverse();
        let t_hat = &pinv * &t;
        let rank = t.rank();
        let surjective = rank == t.rows();
        JetLinearMap { jet, t, t_hat, j_hat: pinv, rank, surjective }
    }

    /// Same `T`, but with the complement of `ker T` spanned by the columns of
    /// `c`: `ĵ = C (TC)†`, `T̂ = ĵ T`.
    pub fn with_complement(&self, c: &RationalMatrix) -> Result<JetLinearMap> {
        if c.rows() != self.jet.dim() || c.cols() != self.rank {
            return Err(Error::Dimension(format!(
                "complement must be {}x{}, got {}x{}",
                self.jet.dim(),
                self.rank,
                c.rows(),
                c.cols()
            )));
        }
        let tc = &self.t * c;
        if tc.rank() != self.rank {
            return Err(Error::Precondition("columns do not span a complement of ker T".into()));
        }
        let j_hat = c * &tc.pseudoinverse();
        let t_hat = &j_hat * &self.t;
        Ok(JetLinearMap { j_hat, t_hat, ..self.clone() })
    }

    pub fn kernel_dim(&self) -> usize {
        self.jet.dim() - self.rank
    }
}

/// `T(X) = Σ_α B_α X_α`: column `(ν, α)` of `T` is column `ν` of `B_α`.
pub fn potential_to_jet_map(b: &PotentialSymbol) -> Result<JetLinearMap> {
    let s = &b.symbol;
    let jet = JetSpace::new(s.n(), s.order(), s.dim_from())?;
    let mut t = RationalMatrix::zeros(s.dim_to(), jet.dim());
    for (col, (nu, alpha)) in jet.coordinates.iter().enumerate() {
        let c = s.coefficient(alpha);
        for i in 0..s.dim_to() {
            t.set(i, col, c.get(i, *nu).clone());
        }
    }
    Ok(JetLinearMap::new(jet, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{builtin, BuiltinParams};
    use crate::polyalg::{frac, rat};

    fn jet_map(name: &str, n: usize) -> JetLinearMap {
        let (_, b) = builtin(name, &BuiltinParams::n(n)).unwrap();
        potential_to_jet_map(&b.unwrap()).unwrap()
    }

    #[test]
    fn jet_counts() {
        let j = JetSpace::new(3, 2, 2).unwrap();
        assert_eq!(j.dim(), 12);
        assert_eq!(j.big_n(), 6);
        // Ψ[(0, e_1), 2] = X_{0, e_1 + e_3}
        let r = j.psi_rows.iter().position(|(nu, b)| *nu == 0 && b.exponents() == [0, 1, 0]).unwrap();
        let c = j.psi_coordinate(r, 2);
        assert_eq!(j.coordinates[c], (0, MultiIndex::new(vec![0, 1, 1])));
    }

    #[test]
    fn symmetric_gradient_gives_symmetric_projection() {
        let m = jet_map("symgrad", 2);
        // jet coordinates: X_{u1,1}, X_{u1,2}, X_{u2,1}, X_{u2,2}
        let half = frac(1, 2);
        let expected = RationalMatrix::from_rows(vec![
            vec![rat(1), rat(0), rat(0), rat(0)],
            vec![rat(0), half.clone(), half.clone(), rat(0)],
            vec![rat(0), half.clone(), half, rat(0)],
            vec![rat(0), rat(0), rat(0), rat(1)],
        ])
        .unwrap();
        assert_eq!(m.t_hat, expected);
        assert_eq!(&m.t_hat * &m.t_hat, m.t_hat);
        assert!(m.surjective);
    }

    #[test]
    fn perp_gradient_is_invertible() {
        let m = jet_map("div", 2);
        assert_eq!(m.kernel_dim(), 0);
        assert_eq!(m.t_hat, RationalMatrix::identity(2));
        assert_eq!(&m.t * &m.j_hat, RationalMatrix::identity(2));
    }

    #[test]
    fn hessian_jet_map_is_identity() {
        let m = jet_map("hessian", 2);
        assert_eq!(m.t, RationalMatrix::identity(3));
    }
}
