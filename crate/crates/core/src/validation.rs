use std::fmt;

/// Kind of invariant a network or route breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    SelfLoop,
    DuplicateLink,
    DuplicateName,
    SigmaInvolution,
    SigmaEndpoints,
    NegativeCapacity,
    InvalidDuration,
    DurationExceedsPeriod,
    EmptyRoute,
    NotContiguous,
    Cycle,
    EndpointMismatch,
    MissingDuration,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::SelfLoop => "self-loop",
            ViolationCode::DuplicateLink => "duplicate-link",
            ViolationCode::DuplicateName => "duplicate-name",
            ViolationCode::SigmaInvolution => "sigma-involution",
            ViolationCode::SigmaEndpoints => "sigma-endpoints",
            ViolationCode::NegativeCapacity => "negative-capacity",
            ViolationCode::InvalidDuration => "invalid-duration",
            ViolationCode::DurationExceedsPeriod => "duration-exceeds-period",
            ViolationCode::EmptyRoute => "empty-route",
            ViolationCode::NotContiguous => "not-contiguous",
            ViolationCode::Cycle => "cycle",
            ViolationCode::EndpointMismatch => "endpoint-mismatch",
            ViolationCode::MissingDuration => "missing-duration",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub code: ViolationCode,
    /// Name of the offending object (link, node, route, ...).
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {}", self.code, self.subject, self.detail)
    }
}

/// Collected findings of a validation pass. Findings are kept sorted so two
/// passes over equivalent inputs compare equal regardless of visiting order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(
        &mut self,
        code: ViolationCode,
        subject: impl Into<String>,
        detail: impl Into<String>,
    ) {
        let v = Violation {
            code,
            subject: subject.into(),
            detail: detail.into(),
        };
        let pos = self.violations.binary_search(&v).unwrap_or_else(|p| p);
        self.violations.insert(pos, v);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        for v in other.violations {
            self.push(v.code, v.subject, v.detail);
        }
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn codes(&self) -> Vec<&'static str> {
        self.violations.iter().map(|v| v.code.as_str()).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
