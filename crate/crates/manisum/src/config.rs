//! Run configuration: a flat `key = value` file format with `#` comments,
//! uniform key-based overrides (the CLI maps flags onto the same keys), and
//! validation. The effective configuration serializes back to the same format
//! and reparses to an equal value.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::lifelong::LtmHyper;
use crate::ranking::{MixWeights, OuterOptions, RankOptions};
use crate::summarizer::{SfWeights, SimSource};
use crate::topics::NmfHyper;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    SingleMr,
    Jtmmr,
    Jltmmr,
    JltmmrSf,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::SingleMr => "single_mr",
            Model::Jtmmr => "jtmmr",
            Model::Jltmmr => "jltmmr",
            Model::JltmmrSf => "jltmmr_sf",
        }
    }

    pub fn parse(s: &str) -> Result<Model> {
        match s {
            "single_mr" => Ok(Model::SingleMr),
            "jtmmr" => Ok(Model::Jtmmr),
            "jltmmr" => Ok(Model::Jltmmr),
            "jltmmr_sf" => Ok(Model::JltmmrSf),
            other => Err(Error::Config(format!(
                "unknown model {other:?} (expected single_mr, jtmmr, jltmmr or jltmmr_sf)"
            ))),
        }
    }

    /// Whether this model consults and updates the knowledge base.
    pub fn is_lifelong(&self) -> bool {
        matches!(self, Model::Jltmmr | Model::JltmmrSf)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub corpus: PathBuf,
    pub output: PathBuf,
    pub kb: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub k: usize,
    pub beta: f64,
    pub lambda: f64,
    pub alpha_mr: f64,
    pub alpha_v: f64,
    pub alpha_a: f64,
    pub alpha_overlap: f64,
    pub alpha_ltm: f64,
    pub gamma: f64,
    pub omega: f64,
    pub mu: [f64; 5],
    pub budget: usize,
    pub seed: u64,
    pub nmf_tol: f64,
    pub nmf_max_iters: usize,
    pub outer_tol: f64,
    pub outer_max_iters: usize,
    pub rank_tol: f64,
    pub rank_max_iters: usize,
    pub rank_weighting: bool,
    pub sim_source: SimSource,
    pub rouge_stemming: bool,
    pub rouge_stopwords: bool,
    pub parallelism: usize,
    pub dump_factors: bool,
    pub dump_diagnostics: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: Model::JltmmrSf,
            corpus: PathBuf::new(),
            output: PathBuf::new(),
            kb: None,
            stopwords: None,
            k: 10,
            beta: 0.1,
            lambda: 0.1,
            alpha_mr: 0.85,
            alpha_v: 0.3,
            alpha_a: 0.4,
            alpha_overlap: 0.3,
            alpha_ltm: 0.1,
            gamma: 0.1,
            omega: 1.0,
            mu: [0.2; 5],
            budget: 250,
            seed: 42,
            nmf_tol: 1e-5,
            nmf_max_iters: 500,
            outer_tol: 1e-4,
            outer_max_iters: 10,
            rank_tol: 1e-12,
            rank_max_iters: 10_000,
            rank_weighting: true,
            sim_source: SimSource::Tfidf,
            rouge_stemming: true,
            rouge_stopwords: false,
            parallelism: 1,
            dump_factors: true,
            dump_diagnostics: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for key {key:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Config(format!(
            "bad value {value:?} for key {key:?} (expected true or false)"
        ))),
    }
}

impl RunConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "model" => self.model = Model::parse(value)?,
            "corpus" => self.corpus = PathBuf::from(value),
            "output" => self.output = PathBuf::from(value),
            "kb" => self.kb = Some(PathBuf::from(value)),
            "stopwords" => self.stopwords = Some(PathBuf::from(value)),
            "k" => self.k = parse_num(key, value)?,
            "beta" => self.beta = parse_num(key, value)?,
            "lambda" => self.lambda = parse_num(key, value)?,
            "alpha_mr" => self.alpha_mr = parse_num(key, value)?,
            "alpha_v" => self.alpha_v = parse_num(key, value)?,
            "alpha_a" => self.alpha_a = parse_num(key, value)?,
            "alpha_overlap" => self.alpha_overlap = parse_num(key, value)?,
            "alpha_ltm" => self.alpha_ltm = parse_num(key, value)?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "omega" => self.omega = parse_num(key, value)?,
            "mu1" => self.mu[0] = parse_num(key, value)?,
            "mu2" => self.mu[1] = parse_num(key, value)?,
            "mu3" => self.mu[2] = parse_num(key, value)?,
            "mu4" => self.mu[3] = parse_num(key, value)?,
            "mu5" => self.mu[4] = parse_num(key, value)?,
            "budget" => self.budget = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "nmf_tol" => self.nmf_tol = parse_num(key, value)?,
            "nmf_max_iters" => self.nmf_max_iters = parse_num(key, value)?,
            "outer_tol" => self.outer_tol = parse_num(key, value)?,
            "outer_max_iters" => self.outer_max_iters = parse_num(key, value)?,
            "rank_tol" => self.rank_tol = parse_num(key, value)?,
            "rank_max_iters" => self.rank_max_iters = parse_num(key, value)?,
            "rank_weighting" => self.rank_weighting = parse_bool(key, value)?,
            "sim_source" => {
                self.sim_source = match value {
                    "tfidf" => SimSource::Tfidf,
                    "topic" => SimSource::Topic,
                    _ => {
                        return Err(Error::Config(format!(
                            "bad value {value:?} for sim_source (expected tfidf or topic)"
                        )))
                    }
                }
            }
            "rouge_stemming" => self.rouge_stemming = parse_bool(key, value)?,
            "rouge_stopwords" => self.rouge_stopwords = parse_bool(key, value)?,
            "parallelism" => self.parallelism = parse_num(key, value)?,
            "dump_factors" => self.dump_factors = parse_bool(key, value)?,
            "dump_diagnostics" => self.dump_diagnostics = parse_bool(key, value)?,
            _ => return Err(Error::Config(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Parse a config file over the defaults.
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("expected key = value, got {raw_line:?}"),
                });
            };
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Serialize the effective configuration; reparsing yields an equal value.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("model", self.model.as_str().to_string());
        kv("corpus", self.corpus.display().to_string());
        kv("output", self.output.display().to_string());
        if let Some(kb) = &self.kb {
            kv("kb", kb.display().to_string());
        }
        if let Some(sw) = &self.stopwords {
            kv("stopwords", sw.display().to_string());
        }
        kv("k", self.k.to_string());
        kv("beta", self.beta.to_string());
        kv("lambda", self.lambda.to_string());
        kv("alpha_mr", self.alpha_mr.to_string());
        kv("alpha_v", self.alpha_v.to_string());
        kv("alpha_a", self.alpha_a.to_string());
        kv("alpha_overlap", self.alpha_overlap.to_string());
        kv("alpha_ltm", self.alpha_ltm.to_string());
        kv("gamma", self.gamma.to_string());
        kv("omega", self.omega.to_string());
        for (i, mu) in self.mu.iter().enumerate() {
            kv(&format!("mu{}", i + 1), mu.to_string());
        }
        kv("budget", self.budget.to_string());
        kv("seed", self.seed.to_string());
        kv("nmf_tol", self.nmf_tol.to_string());
        kv("nmf_max_iters", self.nmf_max_iters.to_string());
        kv("outer_tol", self.outer_tol.to_string());
        kv("outer_max_iters", self.outer_max_iters.to_string());
        kv("rank_tol", self.rank_tol.to_string());
        kv("rank_max_iters", self.rank_max_iters.to_string());
        kv("rank_weighting", self.rank_weighting.to_string());
        kv(
            "sim_source",
            match self.sim_source {
                SimSource::Tfidf => "tfidf".to_string(),
                SimSource::Topic => "topic".to_string(),
            },
        );
        kv("rouge_stemming", self.rouge_stemming.to_string());
        kv("rouge_stopwords", self.rouge_stopwords.to_string());
        kv("parallelism", self.parallelism.to_string());
        kv("dump_factors", self.dump_factors.to_string());
        kv("dump_diagnostics", self.dump_diagnostics.to_string());
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.corpus.as_os_str().is_empty() {
            return Err(Error::Config("corpus path is required".into()));
        }
        if self.output.as_os_str().is_empty() {
            return Err(Error::Config("output path is required".into()));
        }
        if self.model.is_lifelong() && self.kb.is_none() {
            return Err(Error::Config(format!(
                "model {} requires a knowledge-base path (kb)",
                self.model.as_str()
            )));
        }
        if self.model == Model::SingleMr && self.alpha_v != 0.0 {
            return Err(Error::Config(
                "single_mr requires alpha_v = 0 (topic features are disabled)".into(),
            ));
        }
        self.mix_weights().validate().map_err(|e| match e {
            Error::Contract(msg) => Error::Config(msg),
            other => other,
        })?;
        if self.k == 0 {
            return Err(Error::Config("k must be >= 1".into()));
        }
        if self.beta < 0.0 || self.lambda < 0.0 || self.alpha_ltm < 0.0 || self.gamma < 0.0 {
            return Err(Error::Config(
                "beta, lambda, alpha_ltm and gamma must be >= 0".into(),
            ));
        }
        if self.omega < 0.0 || self.mu.iter().any(|&m| m < 0.0) {
            return Err(Error::Config("omega and mu weights must be >= 0".into()));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be >= 1 word".into()));
        }
        if self.nmf_tol <= 0.0 || self.outer_tol <= 0.0 || self.rank_tol <= 0.0 {
            return Err(Error::Config("tolerances must be > 0".into()));
        }
        if self.nmf_max_iters == 0 || self.outer_max_iters == 0 || self.rank_max_iters == 0 {
            return Err(Error::Config("iteration limits must be >= 1".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be >= 1".into()));
        }
        Ok(())
    }

    pub fn nmf_hyper(&self) -> NmfHyper {
        NmfHyper {
            k_topics: self.k,
            beta: self.beta,
            lambda: self.lambda,
            max_iters: self.nmf_max_iters,
            rel_tol: self.nmf_tol,
        }
    }

    pub fn ltm_hyper(&self) -> LtmHyper {
        LtmHyper {
            nmf: self.nmf_hyper(),
            alpha_ltm: self.alpha_ltm,
            gamma: self.gamma,
            top_words: 10,
        }
    }

    pub fn mix_weights(&self) -> MixWeights {
        MixWeights {
            alpha_v: self.alpha_v,
            alpha_a: self.alpha_a,
            alpha_overlap: self.alpha_overlap,
            alpha_mr: self.alpha_mr,
        }
    }

    pub fn sf_weights(&self) -> SfWeights {
        SfWeights {
            mu: self.mu,
            omega: self.omega,
            length_budget: self.budget,
        }
    }

    pub fn rank_options(&self) -> RankOptions {
        RankOptions {
            tol: self.rank_tol,
            max_iters: self.rank_max_iters,
        }
    }

    pub fn outer_options(&self) -> OuterOptions {
        OuterOptions {
            f_tol: self.outer_tol,
            max_outer: self.outer_max_iters,
            rank_weighting: self.rank_weighting,
            rank: self.rank_options(),
        }
    }
}
