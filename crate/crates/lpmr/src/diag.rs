//! Diagnostics shared by the checker, the translation validators and the
//! command-line front end. Renders as `severity file:line:col code message`
//! lines or as a JSON-lines stream.

use std::fmt;

use serde::Serialize;

use crate::parse::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub file: Option<String>,
    pub span: Option<Span>,
    /// Expected/actual classifier pair for mismatches, pre-rendered.
    pub expected_actual: Option<(String, String)>,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            file: None,
            span: None,
            expected_actual: None,
        }
    }

    pub fn warning(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, ..Diagnostic::error(code, message) }
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = Some(span);
        self
    }

    pub fn with_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }

    pub fn with_expected_actual(mut self, expected: String, actual: String) -> Self {
        self.expected_actual = Some((expected, actual));
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn text_line(&self) -> String {
        self.to_string()
    }

    pub fn json_line(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            severity: Severity,
            code: &'a str,
            message: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            file: Option<&'a str>,
            #[serde(skip_serializing_if = "Option::is_none")]
            line: Option<u32>,
            #[serde(skip_serializing_if = "Option::is_none")]
            col: Option<u32>,
            #[serde(skip_serializing_if = "Option::is_none")]
            expected: Option<&'a str>,
            #[serde(skip_serializing_if = "Option::is_none")]
            actual: Option<&'a str>,
        }
        let record = Record {
            severity: self.severity,
            code: self.code,
            message: &self.message,
            file: self.file.as_deref(),
            line: self.span.map(|s| s.line),
            col: self.span.map(|s| s.col),
            expected: self.expected_actual.as_ref().map(|(e, _)| e.as_str()),
            actual: self.expected_actual.as_ref().map(|(_, a)| a.as_str()),
        };
        serde_json::to_string(&record).expect("diagnostic serializes")
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev} ")?;
        match (&self.file, &self.span) {
            (Some(file), Some(span)) => write!(f, "{file}:{span} ")?,
            (Some(file), None) => write!(f, "{file} ")?,
            (None, Some(span)) => write!(f, "{span} ")?,
            (None, None) => write!(f, "- ")?,
        }
        write!(f, "{} {}", self.code, self.message)?;
        if let Some((expected, actual)) = &self.expected_actual {
            write!(f, " (expected {expected}, got {actual})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagnosticFormat {
    #[default]
    Text,
    JsonLines,
}

pub fn render(diags: &[Diagnostic], format: DiagnosticFormat) -> String {
    let mut out = String::new();
    for d in diags {
        match format {
            DiagnosticFormat::Text => out.push_str(&d.text_line()),
            DiagnosticFormat::JsonLines => out.push_str(&d.json_line()),
        }
        out.push('\n');
    }
    out
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
