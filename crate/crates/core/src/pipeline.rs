//! End-to-end task construction: parse a `.spec` file, compute timepoints,
//! encode the semantics, generate trace lemmas, resolve the property and
//! assemble the reasoning task.

use thiserror::Error;

use crate::error::{FrontendError, PropertyError, SortError};
use crate::fol::{nat_theory_axioms, LabeledFormula, Signature, Sort};
use crate::lemmas::{generate_all, LemmaConfig, LemmaInstance};
use crate::parser::{parse_spec, SpecFile};
use crate::properties::{requested_traces, resolve_property};
use crate::semantics::{Encoder, TraceMode, VariableSymbolization};
use crate::smtlib::ReasoningTask;
use crate::timepoints::ProgramContext;

#[derive(Debug, Clone, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error("internal sort error: {0}")]
    Sort(#[from] SortError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Command-line trace count, overriding the file's `(set-traces N)`.
    pub traces: Option<u8>,
    pub lemmas: LemmaConfig,
    /// Fail when the file has no property block (required for `encode`).
    pub require_conjecture: bool,
}

/// Everything derived from one `.spec` file.
#[derive(Debug)]
pub struct Built {
    pub spec: SpecFile,
    pub ctx: ProgramContext,
    pub symb: VariableSymbolization,
    pub lemmas: Vec<LemmaInstance>,
    pub semantics_count: usize,
    pub task: ReasoningTask,
}

impl Built {
    pub fn mode(&self) -> TraceMode {
        self.symb.mode()
    }
}

pub fn build_from_source(
    source: &str,
    name: Option<&str>,
    options: &BuildOptions,
) -> Result<Built, PipelineError> {
    let spec = parse_spec(source)?;
    let traces = options
        .traces
        .or_else(|| requested_traces(&spec.directives))
        .unwrap_or(2);
    let mode = match traces {
        1 => TraceMode::One,
        2 => TraceMode::Two,
        n => return Err(PipelineError::Invalid(format!("unsupported trace count {n}"))),
    };

    let ctx = ProgramContext::analyze(&spec.program);
    let symb = VariableSymbolization::new(&spec.program, mode);

    let mut signature = Signature::with_theory();
    if mode == TraceMode::Two {
        signature.declare("t1", vec![], Sort::Trace)?;
        signature.declare("t2", vec![], Sort::Trace)?;
    }
    ctx.declare_symbols(&mut signature, mode == TraceMode::Two)?;
    symb.declare_symbols(&mut signature)?;

    let encoder = Encoder::new(&spec.program, &ctx, &symb);
    let semantics = encoder.encode_program(&spec.program);
    let semantics_count = semantics.len();
    let lemmas = generate_all(&spec.program, &ctx, &symb, &options.lemmas);

    let mut axioms: Vec<LabeledFormula> = nat_theory_axioms();
    axioms.extend(semantics);
    axioms.extend(lemmas.iter().map(|l| l.to_labeled()));

    let conjecture = resolve_property(&spec, &ctx, &symb, &signature)?;
    if options.require_conjecture && conjecture.is_none() {
        return Err(PipelineError::Invalid("no conjecture".into()));
    }

    let task = ReasoningTask {
        signature,
        axioms,
        conjecture,
        mode,
        source: name.map(str::to_string),
    };
    task.validate()?;

    Ok(Built {
        spec,
        ctx,
        symb,
        lemmas,
        semantics_count,
        task,
    })
}
