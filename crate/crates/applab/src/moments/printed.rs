//! The published closed forms, transcribed exactly as typeset, suspected
//! typos included. Every expression is rewritten over d = e^{-2nx} so that
//! P e^{nx} + Q e^{-nx} ratios become (P + Q d) ratios; nothing else is
//! altered. The diff layer compares these against the oracle; do not "fix"
//! a formula here, that would defeat the comparison.

use crate::appell::AppellPair;

/// One published display. Limit rows (`Lemma24*`, `Thm33Rhs`) ignore n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrintedFormula {
    Lemma21M0,
    Lemma21M1,
    Lemma21M2,
    Lemma21M3,
    Lemma21M4,
    Lemma22M0,
    Lemma22M1,
    Lemma22M2,
    Lemma22M3,
    Lemma22M4,
    Lemma23Mu1,
    Lemma23Mu2,
    Lemma23Mu4,
    Lemma24Lim1,
    Lemma24Lim2,
    Lemma24Lim4,
    Thm33Rhs,
    Eq17AtomMass,
}

impl PrintedFormula {
    pub const ALL: [PrintedFormula; 18] = [
        PrintedFormula::Lemma21M0,
        PrintedFormula::Lemma21M1,
        PrintedFormula::Lemma21M2,
        PrintedFormula::Lemma21M3,
        PrintedFormula::Lemma21M4,
        PrintedFormula::Lemma22M0,
        PrintedFormula::Lemma22M1,
        PrintedFormula::Lemma22M2,
        PrintedFormula::Lemma22M3,
        PrintedFormula::Lemma22M4,
        PrintedFormula::Lemma23Mu1,
        PrintedFormula::Lemma23Mu2,
        PrintedFormula::Lemma23Mu4,
        PrintedFormula::Lemma24Lim1,
        PrintedFormula::Lemma24Lim2,
        PrintedFormula::Lemma24Lim4,
        PrintedFormula::Thm33Rhs,
        PrintedFormula::Eq17AtomMass,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PrintedFormula::Lemma21M0 => "lemma21_m0",
            PrintedFormula::Lemma21M1 => "lemma21_m1",
            PrintedFormula::Lemma21M2 => "lemma21_m2",
            PrintedFormula::Lemma21M3 => "lemma21_m3",
            PrintedFormula::Lemma21M4 => "lemma21_m4",
            PrintedFormula::Lemma22M0 => "lemma22_m0",
            PrintedFormula::Lemma22M1 => "lemma22_m1",
            PrintedFormula::Lemma22M2 => "lemma22_m2",
            PrintedFormula::Lemma22M3 => "lemma22_m3",
            PrintedFormula::Lemma22M4 => "lemma22_m4",
            PrintedFormula::Lemma23Mu1 => "lemma23_mu1",
            PrintedFormula::Lemma23Mu2 => "lemma23_mu2",
            PrintedFormula::Lemma23Mu4 => "lemma23_mu4",
            PrintedFormula::Lemma24Lim1 => "lemma24_lim1",
            PrintedFormula::Lemma24Lim2 => "lemma24_lim2",
            PrintedFormula::Lemma24Lim4 => "lemma24_lim4",
            PrintedFormula::Thm33Rhs => "thm33_rhs",
            PrintedFormula::Eq17AtomMass => "eq17_atom_mass",
        }
    }

    /// True for rows that state an n → ∞ limit rather than a finite-n value.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            PrintedFormula::Lemma24Lim1
                | PrintedFormula::Lemma24Lim2
                | PrintedFormula::Lemma24Lim4
                | PrintedFormula::Thm33Rhs
        )
    }

    pub fn evaluate(&self, pair: &AppellPair, n: f64, x: f64, rho: f64, c: u32) -> f64 {
        let d = pair.derivatives_at_one();
        let (a, b) = (d.a, d.b);
        let dd = (-2.0 * n * x).exp();
        let den = a[0] + b[0] * dd;
        let cf = f64::from(c);
        let q1 = n * rho - cf;
        let q2 = n * rho - 2.0 * cf;
        let q3 = n * rho - 3.0 * cf;
        let q4 = n * rho - 4.0 * cf;
        match self {
            PrintedFormula::Lemma21M0 | PrintedFormula::Lemma22M0 => 1.0,

            PrintedFormula::Lemma21M1 => {
                x * (a[0] - b[0] * dd) / den + (a[1] + b[1] * dd) / (n * den)
            }

            PrintedFormula::Lemma21M2 => {
                x * x
                    + x * ((2.0 * a[1] + a[0]) - (2.0 * b[1] + b[0]) * dd) / (n * den)
                    + ((a[2] + a[1]) + (b[2] + b[1]) * dd) / (n * n * den)
            }

            PrintedFormula::Lemma21M3 => {
                x.powi(3) * (a[0] - b[0] * dd) / den
                    + x * x * ((3.0 * a[0] + 2.0 * a[1]) + (3.0 * b[0] + 2.0 * b[1]) * dd)
                        / (n * den)
                    + x * ((a[0] + (n + 6.0) * a[1] + 2.0 * n * a[2])
                        - (b[0] + (6.0 - n) * b[1] + 2.0 * n * b[2]) * dd)
                        / (n * n * den)
                    + ((a[1] + a[3]) + (b[1] + b[3]) * dd) / (n.powi(3) * den)
            }

            PrintedFormula::Lemma21M4 => {
                x.powi(4)
                    + x.powi(3) * (3.0 * (2.0 * a[0] + a[1]) - 3.0 * (2.0 * b[0] + b[1]) * dd)
                        / (n * den)
                    + x * x
                        * ((7.0 * a[0] + 13.0 * a[1] + 4.0 * a[2])
                            + (7.0 * b[0] + 11.0 * b[1] + 4.0 * b[2]) * dd)
                        / (n * n * den)
                    + x * (((-6.0 - 5.0 * n) * a[0]
                        + n * (2.0 * (7.0 + 3.0 * n) * a[1]
                            + 2.0 * (1.0 + 6.0 * n) * a[2]
                            + (2.0 + n) * a[3]))
                        + ((-6.0 + 5.0 * n) * b[0]
                            + n * (2.0 * (-7.0 + 3.0 * n) * b[1]
                                + (2.0 - 12.0 * n) * b[2]
                                - 3.0 * b[3]))
                            * dd)
                        / (n.powi(4) * den)
                    + (((6.0 - 5.0 * n) * a[1] + n * (13.0 * a[2] + 7.0 * a[3] + a[4]))
                        + ((6.0 - 5.0 * n) * b[1] + n * (b[2] + 5.0 * b[3] + b[4])) * dd)
                        / (n.powi(5) * den)
            }

            PrintedFormula::Lemma22M1 => {
                (n * rho * x * (a[0] - b[0] * dd) + rho * (a[1] + b[1] * dd)) / (q1 * den)
            }

            PrintedFormula::Lemma22M2 => {
                (n * rho).powi(2) * x * x / (q1 * q2)
                    + (n * rho
                        * x
                        * ((a[0] + 2.0 * rho * a[1]) - (b[0] + 2.0 * rho * b[1]) * dd)
                        + rho * ((a[1] + rho * a[2]) + (b[1] + rho * b[2]) * dd))
                        / (q1 * q2 * den)
            }

            PrintedFormula::Lemma22M3 => {
                ((n * rho).powi(3) * (a[0] - b[0] * dd) * x.powi(3)
                    + 3.0
                        * (n * rho).powi(2)
                        * ((a[0] + rho * a[1]) + (b[0] + rho * b[1]) * dd)
                        * x
                        * x
                    + n * rho
                        * ((2.0 * a[0] + 3.0 * rho * (2.0 * a[1] + rho * a[2]))
                            - (2.0 * b[0] + 3.0 * rho * (2.0 * b[1] + rho * b[2])) * dd)
                        * x
                    + rho * ((2.0 * a[1] + rho * (3.0 * a[2] + rho * a[3]))
                        + (2.0 * b[1] + rho * (3.0 * b[2] + rho * b[3])) * dd))
                    / (q1 * q2 * q3 * den)
            }

            PrintedFormula::Lemma22M4 => {
                (n * rho).powi(4) * x.powi(4) / (q1 * q2 * q3 * q4)
                    + (2.0
                        * (n * rho).powi(3)
                        * ((3.0 * a[0] + 2.0 * rho * a[1]) - (3.0 * b[0] + 2.0 * rho * b[1]) * dd)
                        * x.powi(3)
                        + (n * rho).powi(2)
                            * ((11.0 * a[0] + 6.0 * rho * (3.0 * a[1] + rho * a[2]))
                                + (11.0 * b[0] + 6.0 * rho * (3.0 * b[1] + rho * b[2])) * dd)
                            * x
                            * x
                        + 2.0
                            * n
                            * rho
                            * ((3.0 * a[0]
                                + rho * (11.0 * a[1]
                                    + 9.0 * rho * a[2]
                                    + 2.0 * rho * rho * a[3]))
                                - (3.0 * b[0]
                                    + rho * (11.0 * b[1]
                                        + 9.0 * rho * b[2]
                                        + 2.0 * rho * rho * b[3]))
                                    * dd)
                            * x
                        + rho * ((6.0 * a[1]
                            + rho * (11.0 * a[2] + 6.0 * rho * a[3] + rho * rho * a[4]))
                            + (6.0 * b[1]
                                + rho * (11.0 * b[2] + 6.0 * rho * b[3] + rho * rho * b[4]))
                                * dd))
                        / (q1 * q2 * q3 * q4 * den)
            }

            PrintedFormula::Lemma23Mu1 => {
                ((-2.0 * n * rho * b[0] * dd + cf * (a[0] + b[0] * dd)) * x
                    + rho * (a[1] + b[1] * dd))
                    / (q1 * den)
            }

            PrintedFormula::Lemma23Mu2 => {
                (cf * n
                    * rho
                    * ((a[0] + 2.0 * cf * cf * a[0])
                        + (-7.0 * b[0] + (4.0 * (n * rho).powi(2) + 2.0 * cf * cf) * b[0]) * dd)
                    * x
                    * x
                    + rho * ((n * a[0] + 4.0 * cf * a[1])
                        + (4.0 * cf * b[1] - n * (b[0] + 4.0 * rho * b[1])) * dd)
                        * x
                    + rho * ((a[1] + rho * a[2]) + (b[1] + rho * b[2]) * dd))
                    / (q1 * q2 * den)
            }

            PrintedFormula::Lemma23Mu4 => {
                let nr = n * rho;
                let x4 = (46.0 * cf.powi(3) * nr * a[0]
                    + 24.0 * cf.powi(4) * a[0]
                    + 3.0 * cf * cf * nr * nr * a[0])
                    + (-146.0 * cf.powi(3) * nr * b[0] - 104.0 * cf * n.powi(3) * rho.powi(3) * b[0]
                        + 16.0 * nr.powi(4) * b[0]
                        + 24.0 * cf.powi(4) * b[0]
                        + 211.0 * cf * cf * nr * nr * b[0])
                        * dd;
                let x3 = (96.0 * rho * cf.powi(3) * a[1]
                    + 4.0 * cf * cf * n * (9.0 * a[0] + 5.0 * rho * a[1])
                    + 3.0 * cf * n * n * rho * a[0])
                    + (96.0 * cf.powi(3) * b[1] - 36.0 * cf * cf * n * b[0]
                        - 124.0 * cf * cf * n * rho * b[1]
                        - 4.0 * n.powi(3) * rho * rho * (3.0 * b[0] + 4.0 * rho * b[1])
                        + 15.0 * cf * n * n * rho * b[0]
                        + 84.0 * cf * n * n * rho * rho * b[1])
                        * dd;
                let x2 = rho
                    * (72.0 * cf * cf * (a[1] + rho * a[2]) + 3.0 * n * n * rho * a[0]
                        - 2.0 * cf * n * (16.0 * a[0] + 3.0 * rho * (9.0 * a[1] + rho * a[2])))
                    + (72.0 * cf * cf * b[1]
                        + 72.0 * cf * cf * rho * b[2]
                        + n * n * rho * (19.0 * b[0] + 24.0 * rho * (2.0 * b[1] + rho * b[2]))
                        + 2.0 * cf * n * (-16.0 * b[0])
                        - 3.0 * rho * (23.0 * b[1] + 15.0 * rho * b[2]))
                        * dd;
                let x1 = -((2.0
                    * rho
                    * (-8.0 * cf * (2.0 * b[1] + 3.0 * rho * b[2])
                        - 8.0 * cf * n.powi(3) * rho * rho * b[3]
                        + 2.0 * n.powi(4) * rho.powi(3) * b[3]
                        + n * (3.0 * b[0]
                            + rho * (15.0 * b[1] + rho * (15.0 * b[2] + 2.0 * rho * b[3])))))
                    * dd
                    - (3.0 * n * a[0]
                        + 16.0 * cf * a[1]
                        + n * rho * (7.0 * a[1] + 3.0 * rho * a[2])));
                let x0 = rho
                    * (6.0 * a[1] + rho * (11.0 * a[2] + 6.0 * rho * a[3] + rho * rho * a[4]))
                    + (6.0 * b[1]
                        + rho * (11.0 * b[2] + 6.0 * n.powi(3) * rho * b[3] + rho * rho * b[4]))
                        * dd;
                (x4 * x.powi(4) + x3 * x.powi(3) + x2 * x * x + x1 * x + x0)
                    / (q1 * q2 * q3 * q4 * den)
            }

            PrintedFormula::Lemma24Lim1 => cf * x / rho + a[1] / a[0],
            PrintedFormula::Lemma24Lim2 => x * (1.0 + cf * x) / rho,
            PrintedFormula::Lemma24Lim4 => {
                let core = 1.0 + cf * x;
                3.0 * x * x * core * core / (rho * rho)
            }

            PrintedFormula::Thm33Rhs => {
                cf * x * x / rho + x * (a[0] + (2.0 - a[1] * rho)) / (a[0] * rho)
            }

            PrintedFormula::Eq17AtomMass => {
                let a0 = pair.a()[0];
                let b0 = pair.b().first().copied().unwrap_or(0.0);
                (a0 + b0 * dd) / den
            }
        }
    }
}
