//! Local trivialization `T: W_D → W_{D₀}` along the homotopy `Γ(t) = t Γ`.
//!
//! The Hamiltonian `H(t) = -Q_t δ⁻¹ γ̇(t)` and the flow
//! `da/dt + (i/h)[H, a] = 0` are handled with exact polynomial dependence on
//! `t`. All `t`-dependent objects are carried one Fedosov degree above the
//! working degree: `(i/h)[H_{N+1}, a_1]` lands in degree `N`, so the guard
//! degree is what makes `T` and `T⁻¹` exact through `N`.

use crate::abelian::{solve_linear, AbelianConnection};
use crate::error::{Error, Result};
use crate::weyl::{delta_inv, WeylForm};

/// The family of Abelian connections `D_t = d + (i/h)[γ(t), ·]` for
/// `Γ(t) = t^p Γ` (`p = 1` unless built with [`Homotopy::with_power`]).
#[derive(Clone, Debug)]
pub struct Homotopy {
    base: AbelianConnection,
    conn_t: AbelianConnection,
    trivial: AbelianConnection,
    gamma_t: WeylForm,
    gamma_dot: WeylForm,
    power: u8,
}

impl Homotopy {
    /// The linear homotopy from the flat connection to `conn`.
    pub fn build(conn: &AbelianConnection) -> Self {
        Homotopy::with_power(conn, 1)
    }

    /// The homotopy `Γ(t) = t^power Γ`.
    pub fn with_power(conn: &AbelianConnection, power: u8) -> Self {
        assert!(power >= 1, "homotopy exponent must be positive");
        let chart = conn.chart();
        let guard = chart
            .with_truncation(chart.n_work() + 1, chart.h_order())
            .expect("guard degree within limits")
            .scaled_by_t_power(power);
        let conn_t = AbelianConnection::build(&guard);
        let trivial = AbelianConnection::build(&guard.flattened());
        let gamma_t = conn_t.gamma_total().clone();
        let gamma_dot = gamma_t.diff_t();
        Homotopy {
            base: conn.clone(),
            conn_t,
            trivial,
            gamma_t,
            gamma_dot,
            power,
        }
    }

    pub fn base(&self) -> &AbelianConnection {
        &self.base
    }

    /// The `t`-dependent connection (at the guard degree).
    pub fn connection_t(&self) -> &AbelianConnection {
        &self.conn_t
    }

    /// `D₀ = d - δ` at the guard degree.
    pub fn trivial(&self) -> &AbelianConnection {
        &self.trivial
    }

    /// `γ(t)` at the guard degree.
    pub fn gamma_t(&self) -> &WeylForm {
        &self.gamma_t
    }

    /// `γ̇(t)` at the guard degree.
    pub fn gamma_dot(&self) -> &WeylForm {
        &self.gamma_dot
    }

    pub fn r_t(&self) -> &WeylForm {
        self.conn_t.r()
    }

    pub fn power(&self) -> u8 {
        self.power
    }

    /// `γ(1)` at the working degree; equals the base connection's `γ`.
    pub fn gamma_at_one(&self) -> WeylForm {
        self.gamma_t.eval_t_one().with_n_work(self.base.n_work())
    }

    /// `γ(0)`; the trivial connection form `ω_ij y^i dx^j`.
    pub fn gamma_at_zero(&self) -> WeylForm {
        self.gamma_t.eval_t_zero().with_n_work(self.base.n_work())
    }

    /// `D_t a` for a form at the guard degree.
    pub fn apply_d_t(&self, a: &WeylForm) -> WeylForm {
        self.conn_t.apply_d(a)
    }

    fn lift(&self, a: &WeylForm) -> WeylForm {
        a.with_n_work(self.conn_t.n_work())
    }
}

/// Builds the linear homotopy for `conn`.
pub fn build_homotopy(conn: &AbelianConnection) -> Homotopy {
    Homotopy::build(conn)
}

/// The Hamiltonian of a homotopy together with the flow maps it generates.
#[derive(Clone, Debug)]
pub struct TrivializationMap {
    homotopy: Homotopy,
    h_t: WeylForm,
}

/// `H(t) = -Q_t δ⁻¹ γ̇(t)`.
pub fn hamiltonian(homotopy: &Homotopy) -> TrivializationMap {
    let source = delta_inv(homotopy.gamma_dot());
    let h_t = -homotopy.conn_t.quantize_form(&source);
    TrivializationMap {
        homotopy: homotopy.clone(),
        h_t,
    }
}

impl TrivializationMap {
    pub fn build(conn: &AbelianConnection) -> Self {
        hamiltonian(&Homotopy::build(conn))
    }

    pub fn homotopy(&self) -> &Homotopy {
        &self.homotopy
    }

    /// `H(t)` at the guard degree.
    pub fn hamiltonian_t(&self) -> &WeylForm {
        &self.h_t
    }

    /// `H(t)` truncated at the working degree.
    pub fn hamiltonian(&self) -> WeylForm {
        self.h_t.with_n_work(self.homotopy.base.n_work())
    }

    /// The `y`-dependent part of `D_t H(t) - γ̇(t)` through the working degree;
    /// zero when `H` is a valid Hamiltonian.
    pub fn condition_residual(&self) -> WeylForm {
        let n = self.homotopy.base.n_work();
        let lhs = &self.homotopy.apply_d_t(&self.h_t) - self.homotopy.gamma_dot();
        lhs.filter(|k| !k.is_y_free()).up_to_degree(n)
    }

    fn check_input(&self, a: &WeylForm) -> Result<()> {
        let base = &self.homotopy.base;
        if a.dim() != base.dim() || a.n_work() != base.n_work() {
            return Err(Error::Config(format!(
                "form of dimension {} / degree {} used with a trivialization of dimension {} / degree {}",
                a.dim(),
                a.n_work(),
                base.dim(),
                base.n_work()
            )));
        }
        Ok(())
    }

    /// `T⁻¹: W_{D₀} → W_D`, the time-one flow of `da/dt = -(i/h)[H, a]`.
    pub fn apply_t_inv(&self, a0: &WeylForm) -> Result<WeylForm> {
        self.check_input(a0)?;
        let lifted = self.homotopy.lift(a0);
        let horizon = a0.n_work().saturating_sub(1);
        if !self.homotopy.trivial.is_flat_through(&lifted, horizon) {
            return Err(Error::Domain("input is not flat for D₀ = d - δ".into()));
        }
        Ok(self.apply_t_inv_unchecked(a0))
    }

    /// `T: W_D → W_{D₀}`, solving the flow backwards from `t = 1`.
    pub fn apply_t(&self, a1: &WeylForm) -> Result<WeylForm> {
        self.check_input(a1)?;
        let horizon = a1.n_work().saturating_sub(1);
        if !self.homotopy.base.is_flat_through(a1, horizon) {
            return Err(Error::Domain(
                "input is not flat for the Abelian connection D".into(),
            ));
        }
        Ok(self.apply_t_unchecked(a1))
    }

    /// Solves `a(t) = a0 - ∫_0^t (i/h)[H(τ), a(τ)] dτ` and returns `a(1)`.
    pub fn apply_t_inv_unchecked(&self, a0: &WeylForm) -> WeylForm {
        let n = a0.n_work();
        let seed = self.homotopy.lift(a0);
        let traj = solve_linear(&seed, seed.n_work(), |a| {
            -self.h_t.ih_commutator(a).integrate_t()
        });
        traj.eval_t_one().with_n_work(n)
    }

    /// Solves `a(t) = a1 + ∫_t^1 (i/h)[H(τ), a(τ)] dτ` and returns `a(0)`.
    pub fn apply_t_unchecked(&self, a1: &WeylForm) -> WeylForm {
        let n = a1.n_work();
        let seed = self.homotopy.lift(a1);
        let traj = solve_linear(&seed, seed.n_work(), |a| {
            let prim = self.h_t.ih_commutator(a).integrate_t();
            &prim.eval_t_one() - &prim
        });
        traj.eval_t_zero().with_n_work(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::StarFunction;
    use crate::chart::Chart;
    use crate::poly::Poly;

    #[test]
    fn flat_chart_gives_identity() {
        let conn = AbelianConnection::trivial(2, 6, 2).unwrap();
        let map = TrivializationMap::build(&conn);
        assert!(map.hamiltonian_t().is_zero());
        let a = conn.quantize(&StarFunction::from_poly(&Poly::x(0) * &Poly::x(1)));
        assert_eq!(map.apply_t_inv(&a).unwrap(), a);
        assert_eq!(map.apply_t(&a).unwrap(), a);
    }

    #[test]
    fn endpoints_of_the_homotopy() {
        let chart = Chart::from_entries(2, 5, 1, &[([0, 0, 0], Poly::x(1))]).unwrap();
        let conn = AbelianConnection::build(&chart);
        let h = Homotopy::build(&conn);
        assert_eq!(&h.gamma_at_one(), conn.gamma_total());
        assert_eq!(h.gamma_at_zero(), crate::abelian::omega_form(2, 5));
    }

    #[test]
    fn rejects_non_flat_input() {
        let chart = Chart::from_entries(2, 5, 1, &[([0, 0, 0], Poly::x(1))]).unwrap();
        let conn = AbelianConnection::build(&chart);
        let map = TrivializationMap::build(&conn);
        let not_flat = WeylForm::scalar(2, 5, Poly::x(0));
        assert!(matches!(map.apply_t_inv(&not_flat), Err(Error::Domain(_))));
        assert!(matches!(map.apply_t(&not_flat), Err(Error::Domain(_))));
    }
}
