use alloc::vec::Vec;
use core::fmt;

use super::{Environment, GeometryParams};

/// Closed interval `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub const fn new(min: f64, max: f64) -> Self {
        Interval { min, max }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Parameter {
    D2d,
    H,
    W,
    HBs,
    HUt,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::D2d => "d_2D",
            Parameter::H => "h",
            Parameter::W => "W",
            Parameter::HBs => "h_BS",
            Parameter::HUt => "h_UT",
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One parameter outside its applicability interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub parameter: Parameter,
    pub value: f64,
    pub interval: Interval,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} m outside {} m",
            self.parameter, self.value, self.interval
        )
    }
}

/// Every violation found for one geometry.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ViolationReport {
    pub environment: Option<Environment>,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(env) = self.environment {
            write!(f, "{env}: ")?;
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Default values and applicability intervals of the 3GPP RMa models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApplicabilityRange {
    pub d_2d: Interval,
    pub h: Interval,
    pub w: Interval,
    pub h_bs: Interval,
    pub h_ut: Interval,
    pub defaults: GeometryDefaults,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryDefaults {
    pub h_bs: f64,
    pub h_ut: f64,
    pub w: f64,
    pub h: f64,
}

const DEFAULTS: GeometryDefaults = GeometryDefaults {
    h_bs: GeometryParams::DEFAULT_H_BS,
    h_ut: GeometryParams::DEFAULT_H_UT,
    w: GeometryParams::DEFAULT_W,
    h: GeometryParams::DEFAULT_H,
};

impl ApplicabilityRange {
    pub const LOS: ApplicabilityRange = ApplicabilityRange {
        d_2d: Interval::new(10.0, 10_000.0),
        h: Interval::new(5.0, 50.0),
        w: Interval::new(5.0, 50.0),
        h_bs: Interval::new(10.0, 150.0),
        h_ut: Interval::new(1.0, 10.0),
        defaults: DEFAULTS,
    };

    pub const NLOS: ApplicabilityRange = ApplicabilityRange {
        d_2d: Interval::new(10.0, 5_000.0),
        ..Self::LOS
    };

    pub const fn for_environment(env: Environment) -> &'static ApplicabilityRange {
        match env {
            Environment::Los => &Self::LOS,
            Environment::Nlos => &Self::NLOS,
        }
    }

    fn checks(&self, g: &GeometryParams) -> [(Parameter, f64, Interval); 5] {
        [
            (Parameter::D2d, g.d_2d, self.d_2d),
            (Parameter::H, g.h, self.h),
            (Parameter::W, g.w, self.w),
            (Parameter::HBs, g.h_bs, self.h_bs),
            (Parameter::HUt, g.h_ut, self.h_ut),
        ]
    }
}

/// Lists every parameter of `g` outside its interval for `env`. Never fails;
/// NaN values are reported as violations.
pub fn validate_applicability(g: &GeometryParams, env: Environment) -> ViolationReport {
    let violations = ApplicabilityRange::for_environment(env)
        .checks(g)
        .into_iter()
        .filter(|(_, value, interval)| !interval.contains(*value))
        .map(|(parameter, value, interval)| Violation {
            parameter,
            value,
            interval,
        })
        .collect();
    ViolationReport {
        environment: Some(env),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_applicable_in_both_environments() {
        for env in Environment::ALL {
            let r = ApplicabilityRange::for_environment(env);
            let g = GeometryParams::with_defaults(1000.0);
            assert!(validate_applicability(&g, env).is_empty());
            assert!(r.h_bs.contains(r.defaults.h_bs));
            assert!(r.h_ut.contains(r.defaults.h_ut));
            assert!(r.w.contains(r.defaults.w));
            assert!(r.h.contains(r.defaults.h));
        }
    }

    #[test]
    fn distance_upper_bounds() {
        assert_eq!(ApplicabilityRange::LOS.d_2d.max, 10_000.0);
        assert_eq!(ApplicabilityRange::NLOS.d_2d.max, 5_000.0);
    }

    #[test]
    fn tall_base_station_is_one_violation() {
        let g = GeometryParams {
            h_bs: 200.0,
            ..GeometryParams::with_defaults(1000.0)
        };
        let report = validate_applicability(&g, Environment::Los);
        assert_eq!(report.violations.len(), 1);
        let v = report.violations[0];
        assert_eq!(v.parameter, Parameter::HBs);
        assert_eq!(v.value, 200.0);
        assert_eq!(v.interval, Interval::new(10.0, 150.0));
    }

    #[test]
    fn nlos_distance_limit() {
        let g = GeometryParams::with_defaults(7000.0);
        let report = validate_applicability(&g, Environment::Nlos);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].parameter, Parameter::D2d);
        assert_eq!(report.violations[0].interval, Interval::new(10.0, 5000.0));
        assert!(validate_applicability(&g, Environment::Los).is_empty());
    }

    #[test]
    fn nan_is_a_violation() {
        let g = GeometryParams {
            h: f64::NAN,
            ..GeometryParams::with_defaults(100.0)
        };
        assert_eq!(
            validate_applicability(&g, Environment::Los)
                .violations
                .len(),
            1
        );
    }
}
