//! Model description as given on the command line.

use std::fmt;
use std::str::FromStr;

use lyap_core::model::{Family, Sign};
use lyap_core::montecarlo::ModelSpec;
use lyap_core::{CharacteristicFn, Complex64};

use crate::Failure;

/// Law of the first factor's parameter `t`.
///
/// Grammar: `exp:<p>` (mean `1/p`), `gamma:<k>,<theta>`, `dirac:<t0>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dist {
    Exp { p: f64 },
    Gamma { shape: f64, scale: f64 },
    Dirac { t0: f64 },
}

impl Dist {
    pub fn law(&self) -> Result<CharacteristicFn, Failure> {
        let law = match *self {
            Dist::Exp { p } => CharacteristicFn::exponential(p),
            Dist::Gamma { shape, scale } => CharacteristicFn::gamma(shape, scale),
            Dist::Dirac { t0 } => CharacteristicFn::dirac(t0),
        };
        law.map_err(Failure::from)
    }

    /// The inverse mean `1 / E t`, reported in the `p` column.
    pub fn inverse_mean(&self) -> f64 {
        match *self {
            Dist::Exp { p } => p,
            Dist::Gamma { shape, scale } => 1.0 / (shape * scale),
            Dist::Dirac { t0 } => 1.0 / t0,
        }
    }

    /// The same law with inverse mean `p`, keeping its shape.
    pub fn with_inverse_mean(&self, p: f64) -> Dist {
        match *self {
            Dist::Exp { .. } => Dist::Exp { p },
            Dist::Gamma { shape, .. } => Dist::Gamma { shape, scale: 1.0 / (shape * p) },
            Dist::Dirac { .. } => Dist::Dirac { t0: 1.0 / p },
        }
    }
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{what}: `{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{what} must be finite"));
    }
    Ok(v)
}

impl FromStr for Dist {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, args) = s.split_once(':').ok_or_else(|| format!("law `{s}` must look like exp:<p>, gamma:<k>,<theta> or dirac:<t0>"))?;
        match kind {
            "exp" => {
                let p = number(args, "exp rate")?;
                if p <= 0.0 {
                    return Err("exp rate must be positive".into());
                }
                Ok(Dist::Exp { p })
            }
            "gamma" => {
                let (k, th) = args.split_once(',').ok_or("gamma law needs <k>,<theta>")?;
                let (shape, scale) = (number(k, "gamma shape")?, number(th, "gamma scale")?);
                if shape <= 0.0 || scale <= 0.0 {
                    return Err("gamma shape and scale must be positive".into());
                }
                Ok(Dist::Gamma { shape, scale })
            }
            "dirac" => Ok(Dist::Dirac { t0: number(args, "dirac location")? }),
            other => Err(format!("unknown law `{other}`")),
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Exp { p } => write!(f, "exp:{p}"),
            Dist::Gamma { shape, scale } => write!(f, "gamma:{shape},{scale}"),
            Dist::Dirac { t0 } => write!(f, "dirac:{t0}"),
        }
    }
}

/// Parses `re[,im]`.
pub fn parse_ell(s: &str) -> Result<Complex64, String> {
    let (re, im) = match s.split_once(',') {
        Some((re, im)) => (number(re, "Re l")?, number(im, "Im l")?),
        None => (number(s, "l")?, 0.0),
    };
    Ok(Complex64::new(re, im))
}

/// The random product: family, law of `t`, rate of `tau` and, for
/// `nminus-a1`, the sign of the diagonal parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Model {
    pub family: Family,
    pub dist: Dist,
    pub rho: f64,
    pub sign: Sign,
}

impl Model {
    pub fn validate(&self) -> Result<(), Failure> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Failure::invalid("rho must be positive and finite"));
        }
        self.dist.law().map(|_| ())
    }

    pub fn spec(&self) -> Result<ModelSpec, Failure> {
        ModelSpec::family(self.family, self.dist.law()?, self.rho, self.sign).map_err(Failure::from)
    }

    /// Text for the `model` column.
    pub fn label(&self) -> String {
        let sign = match (self.family, self.sign) {
            (Family::NminusA1, Sign::Plus) => " sign=+",
            (Family::NminusA1, Sign::Minus) => " sign=-",
            _ => "",
        };
        format!("{} t~{} tau~exp:{}{sign}", self.family, self.dist, self.rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_grammar() {
        assert_eq!("exp:0.2".parse::<Dist>().unwrap(), Dist::Exp { p: 0.2 });
        assert_eq!("gamma:2,0.5".parse::<Dist>().unwrap(), Dist::Gamma { shape: 2.0, scale: 0.5 });
        assert_eq!("dirac:-1".parse::<Dist>().unwrap(), Dist::Dirac { t0: -1.0 });
        for bad in ["exp", "exp:0", "exp:-1", "gamma:1", "gamma:0,1", "dirac:x", "beta:1", "exp:inf"] {
            assert!(bad.parse::<Dist>().is_err(), "{bad}");
        }
        let d = Dist::Gamma { shape: 2.0, scale: 0.5 };
        assert_eq!(d.to_string().parse::<Dist>().unwrap(), d);
        assert_eq!(d.inverse_mean(), 1.0);
        assert!((d.with_inverse_mean(4.0).inverse_mean() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn ell_grammar() {
        assert_eq!(parse_ell("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_ell("-0.5,0.7").unwrap(), Complex64::new(-0.5, 0.7));
        assert!(parse_ell("1,").is_err());
        assert!(parse_ell("a").is_err());
    }
}
