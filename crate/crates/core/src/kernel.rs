//! SGP4 near-Earth initialization and propagation.
//!
//! Data-dependent branches of the theory are written as "evaluate both,
//! then [`select`]". The operand feeding a discarded side is guarded first
//! (a divisor replaced by 1, a square-root argument clamped at 0) so that
//! neither side can produce NaN or infinity on valid input. Runtime checks
//! never return early: they only set the error code, and the computed
//! values are kept.
//!
//! Operation order follows the classic reference routines term by term so
//! that 64-bit results agree with them to rounding.

use std::f64::consts::TAU;

use crate::elements::Elements;
use crate::gravity::GravityModel;
use crate::real::{select, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum ErrorCode {
    #[default]
    Ok = 0,
    /// Mean eccentricity outside [0, 1), or perturbed eccentricity ≥ 1
    /// or < −0.001.
    EccOutOfRange = 1,
    MeanMotionNonpositive = 2,
    /// Reserved for the deep-space lunar-solar perturbed eccentricity
    /// check; never produced by the near-Earth theory.
    PertEccOutOfRange = 3,
    SemilatusNegative = 4,
    /// Radius below one Earth radius.
    Suborbital = 6,
    /// Orbital period of 225 minutes or more.
    DeepSpaceUnsupported = 7,
}

impl ErrorCode {
    pub const fn is_ok(self) -> bool {
        matches!(self, ErrorCode::Ok)
    }

    pub const fn from_u8(code: u8) -> Option<Self> {
        Some(match code {
            0 => ErrorCode::Ok,
            1 => ErrorCode::EccOutOfRange,
            2 => ErrorCode::MeanMotionNonpositive,
            3 => ErrorCode::PertEccOutOfRange,
            4 => ErrorCode::SemilatusNegative,
            6 => ErrorCode::Suborbital,
            7 => ErrorCode::DeepSpaceUnsupported,
            _ => return None,
        })
    }
}

/// Calls `$m!` with the name of every scalar field of [`SatInit`], so that
/// the structure-of-arrays batch layout stays in sync with it.
macro_rules! sat_init_scalars {
    ($m:ident) => {
        $m! {
            no_kozai, ecco, inclo, nodeo, argpo, mo, bstar,
            no_unkozai, ao,
            mdot, argpdot, nodedot, nodecf,
            cc1, cc4, cc5, d2, d3, d4, t2cof, t3cof, t4cof, t5cof,
            eta, omgcof, xmcof, delmo, sinmao, aycof, xlcof,
            con41, x1mth2, x7thm1
        }
    };
}
#[allow(unused_imports)]
pub(crate) use sat_init_scalars;

macro_rules! define_sat_init {
    ($($field:ident),* $(,)?) => {
        /// Initialization-derived constants for one satellite.
        ///
        /// Fields, in order: the copied kernel elements; un-Kozai'd mean
        /// motion (rad/min) and semi-major axis (Earth radii); the secular
        /// rates and node drag coupling; the drag series coefficients; the
        /// long-period and short-period coefficient group.
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct SatInit<T> {
            $(pub $field: T,)*
            /// Simplified drag model, set for epoch perigee below 220 km.
            pub isimp: bool,
            pub branches: Branches,
            pub error_code_at_init: ErrorCode,
            pub gravity: GravityModel,
        }
    };
}
sat_init_scalars!(define_sat_init);

/// TEME position (km) and velocity (km/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector<T> {
    pub r: [T; 3],
    pub v: [T; 3],
    pub error_code: ErrorCode,
}

impl<T: Real> StateVector<T> {
    pub fn components(&self) -> [T; 6] {
        let [rx, ry, rz] = self.r;
        let [vx, vy, vz] = self.v;
        [rx, ry, rz, vx, vy, vz]
    }
}

/// Which side of each data-dependent init guard was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Branches {
    pub perigee_below_156: bool,
    pub perigee_below_98: bool,
    pub ecc_above_1e4: bool,
    pub cosio_away_from_minus1: bool,
    pub isimp: bool,
}

/// Optional overrides of the data-dependent guards in [`sgp4_init`], used to
/// check that both sides of every select stay finite.
#[derive(Debug, Clone, Copy, Default)]
pub struct GuardOverrides {
    pub perigee_below_156: Option<bool>,
    pub perigee_below_98: Option<bool>,
    pub ecc_above_1e4: Option<bool>,
    pub cosio_away_from_minus1: Option<bool>,
    pub isimp: Option<bool>,
}

pub fn sgp4_init<T: Real>(elems: &Elements<T>, grav: &GravityModel) -> SatInit<T> {
    sgp4_init_with(elems, grav, GuardOverrides::default())
}

pub fn sgp4_init_with<T: Real>(elems: &Elements<T>, grav: &GravityModel, guards: GuardOverrides) -> SatInit<T> {
    let c = T::from_f64;
    let zero = c(0.0);
    let one = c(1.0);
    let x2o3 = 2.0 / 3.0;
    let re = grav.radius_earth_km;
    let (xke, j2, j4, j3oj2) = (c(grav.xke), c(grav.j2), c(grav.j4), c(grav.j3oj2));

    let no_kozai_ok = elems.no_kozai > zero;
    let ecco_ok = elems.ecco >= zero && elems.ecco < one;
    let no_kozai = select(no_kozai_ok, elems.no_kozai, c(0.05));
    let ecco = select(ecco_ok, elems.ecco, zero);
    let (inclo, argpo, mo, bstar) = (elems.inclo, elems.argpo, elems.mo, elems.bstar);

    let ss = c(78.0 / re + 1.0);
    let qzms2ttemp = (120.0 - 78.0) / re;
    let qzms2t = c(qzms2ttemp * qzms2ttemp * qzms2ttemp * qzms2ttemp);
    let temp4 = c(1.5e-12);

    let eccsq = ecco * ecco;
    let omeosq = one - eccsq;
    let rteosq = omeosq.sqrt();
    let cosio = inclo.cos();
    let cosio2 = cosio * cosio;
    let ak = (xke / no_kozai).powf(x2o3);
    let d1 = c(0.75) * j2 * (c(3.0) * cosio2 - one) / (rteosq * omeosq);
    let del = d1 / (ak * ak);
    let adel = ak * (one - del * del - del * (c(1.0 / 3.0) + c(134.0) * del * del / c(81.0)));
    let del = d1 / (adel * adel);
    let no_unkozai = no_kozai / (one + del);
    let ao = (xke / no_unkozai).powf(x2o3);
    let sinio = inclo.sin();
    let po = ao * omeosq;
    let con42 = one - c(5.0) * cosio2;
    let con41 = -con42 - cosio2 - cosio2;
    let posq = po * po;
    let rp = ao * (one - ecco);

    let deep_space = c(TAU) / no_unkozai >= c(225.0);

    let isimp = guards.isimp.unwrap_or(rp < c(220.0 / re + 1.0));
    let perige = (rp - one) * c(re);
    let below_156 = guards.perigee_below_156.unwrap_or(perige < c(156.0));
    let below_98 = guards.perigee_below_98.unwrap_or(perige < c(98.0));
    let sfour_low = select(below_98, c(20.0), perige - c(78.0));
    let qzms24temp = (c(120.0) - sfour_low) / c(re);
    let qzms24_low = qzms24temp * qzms24temp * qzms24temp * qzms24temp;
    let sfour_low = sfour_low / c(re) + one;
    let sfour = select(below_156, sfour_low, ss);
    let qzms24 = select(below_156, qzms24_low, qzms2t);

    let pinvsq = one / posq;
    let tsi = one / (ao - sfour);
    let eta = ao * ecco * tsi;
    let etasq = eta * eta;
    let eeta = ecco * eta;
    let psisq = (one - etasq).abs();
    let coef = qzms24 * tsi.powf(4.0);
    let coef1 = coef / psisq.powf(3.5);
    let cc2 = coef1
        * no_unkozai
        * (ao * (one + c(1.5) * etasq + eeta * (c(4.0) + etasq))
            + c(0.375) * j2 * tsi / psisq * con41 * (c(8.0) + c(3.0) * etasq * (c(8.0) + etasq)));
    let cc1 = bstar * cc2;

    let ecc_above = guards.ecc_above_1e4.unwrap_or(ecco > c(1.0e-4));
    let ecco_div = select(ecc_above, ecco, one);
    let cc3 = select(
        ecc_above,
        c(-2.0) * coef * tsi * j3oj2 * no_unkozai * sinio / ecco_div,
        zero,
    );
    let x1mth2 = one - cosio2;
    let cc4 = c(2.0)
        * no_unkozai
        * coef1
        * ao
        * omeosq
        * (eta * (c(2.0) + c(0.5) * etasq) + ecco * (c(0.5) + c(2.0) * etasq)
            - j2 * tsi / (ao * psisq)
                * (c(-3.0) * con41 * (one - c(2.0) * eeta + etasq * (c(1.5) - c(0.5) * eeta))
                    + c(0.75) * x1mth2 * (c(2.0) * etasq - eeta * (one + etasq)) * (c(2.0) * argpo).cos()));
    let cc5 = c(2.0) * coef1 * ao * omeosq * (one + c(2.75) * (etasq + eeta) + eeta * etasq);
    let cosio4 = cosio2 * cosio2;
    let temp1 = c(1.5) * j2 * pinvsq * no_unkozai;
    let temp2 = c(0.5) * temp1 * j2 * pinvsq;
    let temp3 = c(-0.46875) * j4 * pinvsq * pinvsq * no_unkozai;
    let mdot = no_unkozai
        + c(0.5) * temp1 * rteosq * con41
        + c(0.0625) * temp2 * rteosq * (c(13.0) - c(78.0) * cosio2 + c(137.0) * cosio4);
    let argpdot = c(-0.5) * temp1 * con42
        + c(0.0625) * temp2 * (c(7.0) - c(114.0) * cosio2 + c(395.0) * cosio4)
        + temp3 * (c(3.0) - c(36.0) * cosio2 + c(49.0) * cosio4);
    let xhdot1 = -temp1 * cosio;
    let nodedot = xhdot1
        + (c(0.5) * temp2 * (c(4.0) - c(19.0) * cosio2) + c(2.0) * temp3 * (c(3.0) - c(7.0) * cosio2)) * cosio;
    let omgcof = bstar * cc3 * argpo.cos();
    let eeta_div = select(ecc_above, eeta, one);
    let xmcof = select(ecc_above, c(-x2o3) * coef * bstar / eeta_div, zero);
    let nodecf = c(3.5) * omeosq * xhdot1 * cc1;
    let t2cof = c(1.5) * cc1;
    let cosio_ok = guards
        .cosio_away_from_minus1
        .unwrap_or((cosio + one).abs() > c(1.5e-12));
    let xlcof_div = select(cosio_ok, one + cosio, temp4);
    let xlcof = c(-0.25) * j3oj2 * sinio * (c(3.0) + c(5.0) * cosio) / xlcof_div;
    let aycof = c(-0.5) * j3oj2 * sinio;
    let delmotemp = one + eta * mo.cos();
    let delmo = delmotemp * delmotemp * delmotemp;
    let sinmao = mo.sin();
    let x7thm1 = c(7.0) * cosio2 - one;

    let cc1sq = cc1 * cc1;
    let d2 = c(4.0) * ao * tsi * cc1sq;
    let temp = d2 * tsi * cc1 / c(3.0);
    let d3 = (c(17.0) * ao + sfour) * temp;
    let d4 = c(0.5) * temp * ao * tsi * (c(221.0) * ao + c(31.0) * sfour) * cc1;
    let t3cof = d2 + c(2.0) * cc1sq;
    let t4cof = c(0.25) * (c(3.0) * d3 + cc1 * (c(12.0) * d2 + c(10.0) * cc1sq));
    let t5cof = c(0.2)
        * (c(3.0) * d4 + c(12.0) * cc1 * d3 + c(6.0) * d2 * d2 + c(15.0) * cc1sq * (c(2.0) * d2 + cc1sq));

    let mut sat = SatInit {
        no_kozai: elems.no_kozai,
        ecco: elems.ecco,
        inclo,
        nodeo: elems.nodeo,
        argpo,
        mo,
        bstar,
        no_unkozai,
        ao,
        mdot,
        argpdot,
        nodedot,
        nodecf,
        cc1,
        cc4,
        cc5,
        d2: select(isimp, zero, d2),
        d3: select(isimp, zero, d3),
        d4: select(isimp, zero, d4),
        t2cof,
        t3cof: select(isimp, zero, t3cof),
        t4cof: select(isimp, zero, t4cof),
        t5cof: select(isimp, zero, t5cof),
        eta,
        omgcof,
        xmcof,
        delmo,
        sinmao,
        aycof,
        xlcof,
        con41,
        x1mth2,
        x7thm1,
        isimp,
        branches: Branches {
            perigee_below_156: below_156,
            perigee_below_98: below_98,
            ecc_above_1e4: ecc_above,
            cosio_away_from_minus1: cosio_ok,
            isimp,
        },
        error_code_at_init: ErrorCode::Ok,
        gravity: *grav,
    };

    let at_epoch = propagate_unchecked(&sat, zero).error_code;
    sat.error_code_at_init = select(
        !no_kozai_ok,
        ErrorCode::MeanMotionNonpositive,
        select(
            !ecco_ok,
            ErrorCode::EccOutOfRange,
            select(deep_space, ErrorCode::DeepSpaceUnsupported, at_epoch),
        ),
    );
    sat
}

/// Propagates to `tsince_min` minutes from epoch.
///
/// A satellite whose initialization failed is not run through the kernel;
/// every cell reports the init error code with NaN values.
pub fn sgp4_propagate<T: Real>(sat: &SatInit<T>, tsince_min: T) -> StateVector<T> {
    if !sat.error_code_at_init.is_ok() {
        let nan = T::from_f64(f64::NAN);
        return StateVector {
            r: [nan; 3],
            v: [nan; 3],
            error_code: sat.error_code_at_init,
        };
    }
    propagate_unchecked(sat, tsince_min)
}

/// One clamped Newton step of the SGP4 Kepler iteration. Returns the
/// correction together with the sine and cosine evaluated at `eo1`.
#[inline(always)]
pub fn kepler_newton_step<T: Real>(axnl: T, aynl: T, u: T, eo1: T) -> (T, T, T) {
    let c = T::from_f64;
    let sineo1 = eo1.sin();
    let coseo1 = eo1.cos();
    let denom = c(1.0) - coseo1 * axnl - sineo1 * aynl;
    let tem5 = (u - aynl * coseo1 + axnl * sineo1 - eo1) / denom;
    let clamped = select(tem5 > c(0.0), c(0.95), c(-0.95));
    (select(tem5.abs() >= c(0.95), clamped, tem5), sineo1, coseo1)
}

/// Solves `u = E − axnl·sin E + aynl·cos E` style Kepler equation by at most
/// ten clamped Newton steps. Returns the final iterate and the sine and
/// cosine from the last step taken, which lag the returned iterate by one
/// update exactly as in the reference routine.
#[inline(always)]
pub fn kepler_iterate<T: Real>(axnl: T, aynl: T, u: T) -> (T, T, T) {
    let mut eo1 = u;
    let mut sineo1 = T::from_f64(0.0);
    let mut coseo1 = T::from_f64(1.0);
    let tol = T::from_f64(1.0e-12);
    for _ in 0..10 {
        let (step, s, c) = kepler_newton_step(axnl, aynl, u, eo1);
        sineo1 = s;
        coseo1 = c;
        eo1 = eo1 + step;
        if step.abs() < tol {
            break;
        }
    }
    (eo1, sineo1, coseo1)
}

/// Kepler solve on the equinoctial-like components used by SGP4.
/// Non-convergence after ten steps returns the last iterate.
pub fn solve_kepler<T: Real>(axn_like: T, ayn_like: T, u_init: T) -> T {
    kepler_iterate(axn_like, ayn_like, u_init).0
}

#[inline(always)]
fn propagate_unchecked<T: Real>(s: &SatInit<T>, t: T) -> StateVector<T> {
    let c = T::from_f64;
    let zero = c(0.0);
    let one = c(1.0);
    let grav = &s.gravity;
    let xke = c(grav.xke);
    let j2 = c(grav.j2);
    let x2o3 = 2.0 / 3.0;
    let vkmpersec = c(grav.velocity_scale());

    let xmdf = s.mo + s.mdot * t;
    let argpdf = s.argpo + s.argpdot * t;
    let nodedf = s.nodeo + s.nodedot * t;
    let t2 = t * t;
    let nodem = nodedf + s.nodecf * t2;
    let tempa = one - s.cc1 * t;
    let tempe = s.bstar * s.cc4 * t;
    let templ = s.t2cof * t2;

    let delomg = s.omgcof * t;
    let delmtemp = one + s.eta * xmdf.cos();
    let delm = s.xmcof * (delmtemp * delmtemp * delmtemp - s.delmo);
    let temp = delomg + delm;
    let mm_full = xmdf + temp;
    let argpm_full = argpdf - temp;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let tempa_full = tempa - s.d2 * t2 - s.d3 * t3 - s.d4 * t4;
    let tempe_full = tempe + s.bstar * s.cc5 * (mm_full.sin() - s.sinmao);
    let templ_full = templ + s.t3cof * t3 + t4 * (s.t4cof + t * s.t5cof);

    let mm = select(s.isimp, xmdf, mm_full);
    let argpm = select(s.isimp, argpdf, argpm_full);
    let tempa = select(s.isimp, tempa, tempa_full);
    let tempe = select(s.isimp, tempe, tempe_full);
    let templ = select(s.isimp, templ, templ_full);

    let err_nm = s.no_unkozai <= zero;
    let nm = select(err_nm, one, s.no_unkozai);
    let am = (xke / nm).powf(x2o3) * tempa * tempa;
    let nm = xke / am.powf(1.5);
    let em = s.ecco - tempe;
    let err_ecc = em >= one || em < c(-0.001);
    let em = select(em < c(1.0e-6), c(1.0e-6), em);
    let em = select(em >= one, c(1.0 - 1.0e-6), em);
    let mm = mm + s.no_unkozai * templ;
    let xlm = mm + argpm + nodem;
    let nodem = nodem.fmod(TAU);
    let argpm = argpm.fmod(TAU);
    let xlm = xlm.fmod(TAU);
    let mm = (xlm - argpm - nodem).fmod(TAU);

    let inclm = s.inclo;
    let sinip = inclm.sin();
    let cosip = inclm.cos();
    let (ep, xincp, argpp, nodep, mp) = (em, inclm, argpm, nodem, mm);

    let axnl = ep * argpp.cos();
    let temp = one / (am * (one - ep * ep));
    let aynl = ep * argpp.sin() + temp * s.aycof;
    let xl = mp + argpp + nodep + temp * s.xlcof * axnl;

    let u = (xl - nodep).fmod(TAU);
    let (_, sineo1, coseo1) = kepler_iterate(axnl, aynl, u);

    let ecose = axnl * coseo1 + aynl * sineo1;
    let esine = axnl * sineo1 - aynl * coseo1;
    let el2 = axnl * axnl + aynl * aynl;
    let pl = am * (one - el2);
    let err_pl = pl < zero;
    let pl = select(err_pl, one, pl);
    let rl = am * (one - ecose);
    let rdotl = am.sqrt() * esine / rl;
    let rvdotl = pl.sqrt() / rl;
    let one_minus_el2 = one - el2;
    let betal = select(one_minus_el2 < zero, zero, one_minus_el2).sqrt();
    let temp = esine / (one + betal);
    let sinu = am / rl * (sineo1 - aynl - axnl * temp);
    let cosu = am / rl * (coseo1 - axnl + aynl * temp);
    let su = sinu.atan2(cosu);
    let sin2u = (cosu + cosu) * sinu;
    let cos2u = one - c(2.0) * sinu * sinu;
    let temp = one / pl;
    let temp1 = c(0.5) * j2 * temp;
    let temp2 = temp1 * temp;

    let mrt = rl * (one - c(1.5) * temp2 * betal * s.con41) + c(0.5) * temp1 * s.x1mth2 * cos2u;
    let su = su - c(0.25) * temp2 * s.x7thm1 * sin2u;
    let xnode = nodep + c(1.5) * temp2 * cosip * sin2u;
    let xinc = xincp + c(1.5) * temp2 * cosip * sinip * cos2u;
    let mvt = rdotl - nm * temp1 * s.x1mth2 * sin2u / xke;
    let rvdot = rvdotl + nm * temp1 * (s.x1mth2 * cos2u + c(1.5) * s.con41) / xke;

    let sinsu = su.sin();
    let cossu = su.cos();
    let snod = xnode.sin();
    let cnod = xnode.cos();
    let sini = xinc.sin();
    let cosi = xinc.cos();
    let xmx = -snod * cosi;
    let xmy = cnod * cosi;
    let ux = xmx * sinsu + cnod * cossu;
    let uy = xmy * sinsu + snod * cossu;
    let uz = sini * sinsu;
    let vx = xmx * cossu - cnod * sinsu;
    let vy = xmy * cossu - snod * sinsu;
    let vz = sini * cossu;

    let mr = mrt * c(grav.radius_earth_km);
    let error_code = select(
        err_nm,
        ErrorCode::MeanMotionNonpositive,
        select(
            err_ecc,
            ErrorCode::EccOutOfRange,
            select(
                err_pl,
                ErrorCode::SemilatusNegative,
                select(mrt < one, ErrorCode::Suborbital, ErrorCode::Ok),
            ),
        ),
    );
    StateVector {
        r: [mr * ux, mr * uy, mr * uz],
        v: [
            (mvt * ux + rvdot * vx) * vkmpersec,
            (mvt * uy + rvdot * vy) * vkmpersec,
            (mvt * uz + rvdot * vz) * vkmpersec,
        ],
        error_code,
    }
}

impl<T: Real> SatInit<T> {
    /// Every scalar field, in declaration order.
    pub fn scalars(&self) -> Vec<T> {
        macro_rules! collect {
            ($($f:ident),*) => { vec![$(self.$f),*] };
        }
        sat_init_scalars!(collect)
    }
}
