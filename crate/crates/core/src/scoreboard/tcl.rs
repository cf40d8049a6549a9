use minijinja::{context, Environment, UndefinedBehavior};
use thiserror::Error;

use crate::rtl::{reset_active_low, Mode};

/// Bundled FPV setup template.
pub const FPV_TEMPLATE: &str = include_str!("../../../../templates/fpv.tcl.tmpl");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TclRequest {
    pub design_id: String,
    pub top: String,
    pub rtl_path: String,
    pub assertion_paths: Vec<String>,
    pub clock: Option<String>,
    pub reset: Option<String>,
    pub mode: Mode,
    pub horizon: usize,
}

#[derive(Debug, Error)]
pub enum TclError {
    #[error("design '{0}' is sequential but has no clock signal")]
    MissingClock(String),
    #[error("template: {0}")]
    Template(#[from] minijinja::Error),
}

pub fn emit_tcl(req: &TclRequest) -> Result<String, TclError> {
    emit_tcl_with(FPV_TEMPLATE, req)
}

/// Renders `template` for `req`. Combinational designs get no clock or
/// reset lines.
pub fn emit_tcl_with(template: &str, req: &TclRequest) -> Result<String, TclError> {
    let clock = match req.mode {
        Mode::Sequential => Some(req.clock.clone().ok_or_else(|| TclError::MissingClock(req.design_id.clone()))?),
        Mode::Combinational => None,
    };
    let reset = clock.as_ref().and(req.reset.as_ref()).map(|r| {
        if reset_active_low(r) {
            format!("!{r}")
        } else {
            r.clone()
        }
    });
    let mut env = Environment::new();
    env.set_undefined_behavior(UndefinedBehavior::Strict);
    env.set_keep_trailing_newline(true);
    env.add_template("fpv", template)?;
    let out = env.get_template("fpv")?.render(context! {
        design_id => req.design_id,
        top => req.top,
        rtl_path => req.rtl_path,
        assertion_paths => req.assertion_paths,
        clock => clock,
        reset => reset,
        horizon => req.horizon,
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(mode: Mode) -> TclRequest {
        TclRequest {
            design_id: "d".into(),
            top: "top".into(),
            rtl_path: "designs/d/d.v".into(),
            assertion_paths: vec!["a0.sv".into(), "a1.sv".into()],
            clock: Some("clk".into()),
            reset: Some("rst_n".into()),
            mode,
            horizon: 20,
        }
    }

    #[test]
    fn sequential_has_clock_and_reset() {
        let s = emit_tcl(&req(Mode::Sequential)).unwrap();
        assert!(s.contains("\nclock clk\n"));
        assert!(s.contains("\nreset -expression {!rst_n}\n"));
        assert!(s.contains("analyze -sv09 a1.sv\nelaborate -top top\n"));
        assert_eq!(s, emit_tcl(&req(Mode::Sequential)).unwrap());
    }

    #[test]
    fn combinational_has_neither() {
        let s = emit_tcl(&req(Mode::Combinational)).unwrap();
        assert!(!s.contains("clock"));
        assert!(!s.contains("reset"));
    }

    #[test]
    fn missing_clock() {
        let r = TclRequest { clock: None, ..req(Mode::Sequential) };
        assert!(matches!(emit_tcl(&r), Err(TclError::MissingClock(_))));
    }
}
