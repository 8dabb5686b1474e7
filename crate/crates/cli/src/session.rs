//! Loaded data plus the last answer, shared by batch and interactive modes.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use inferqa::city_plan::{CityPlan, SpeedTable};
use inferqa::cnl_parser::{render_answer, render_fact, Parser};
use inferqa::fact_store::{FactId, FactStore};
use inferqa::inference::{Answer, Engine, EngineConfig};
use inferqa::knowledge_base::{KnowledgeBase, VerbDictionary};
use inferqa::time::Calendar;

pub struct Session {
    pub kb: KnowledgeBase,
    pub store: FactStore,
    pub plan: Option<CityPlan>,
    pub speeds: SpeedTable,
    pub config: EngineConfig,
    pub verbose: bool,
    last: Option<Answer>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

impl Session {
    pub fn new(verbs: &Path, calendar: Calendar, config: EngineConfig) -> Result<Session> {
        let dict = VerbDictionary::load(&read(verbs)?).with_context(|| verbs.display().to_string())?;
        Ok(Session {
            kb: KnowledgeBase::with_verbs(dict),
            store: FactStore::with_calendar(calendar),
            plan: None,
            speeds: SpeedTable::default(),
            config,
            verbose: false,
            last: None,
        })
    }

    /// All or nothing: a bad line leaves the store as it was.
    pub fn load_facts(&mut self, path: &Path) -> Result<usize> {
        let text = read(path)?;
        let mut store = self.store.clone();
        let ids = Parser::new(&self.kb).load_facts(&mut store, &text).with_context(|| path.display().to_string())?;
        self.store = store;
        Ok(ids.len())
    }

    pub fn load_frames(&mut self, path: &Path) -> Result<usize> {
        let text = read(path)?;
        let mut kb = self.kb.clone();
        let n = kb.load_frames(&text).with_context(|| path.display().to_string())?;
        self.kb = kb;
        Ok(n)
    }

    pub fn load_plan(&mut self, path: &Path) -> Result<()> {
        let plan = CityPlan::load(&read(path)?).with_context(|| path.display().to_string())?;
        self.plan = Some(plan);
        Ok(())
    }

    pub fn load_speeds(&mut self, path: &Path) -> Result<()> {
        self.speeds = SpeedTable::load(&read(path)?).with_context(|| path.display().to_string())?;
        Ok(())
    }

    /// Answer one question: the rendered answer and its validity, plus the
    /// trail in verbose mode.
    pub fn ask(&mut self, question: &str) -> Result<String> {
        let q = Parser::new(&self.kb).parse_question(question)?;
        let mut engine = Engine::new(&self.store, &self.kb).with_speeds(self.speeds.clone()).with_config(self.config);
        if let Some(plan) = &self.plan {
            engine = engine.with_plan(plan);
        }
        let answer = engine.answer(&q)?;
        let tail = if self.verbose { answer.explain() } else { format!("validity: {}", answer.validity()) };
        let out = format!("{}\n{tail}", render_answer(&answer));
        self.last = Some(answer);
        Ok(out)
    }

    pub fn explain(&self) -> Result<String> {
        self.last.as_ref().map(Answer::explain).ok_or_else(|| anyhow!("no previous answer"))
    }

    /// Facts as `id: sentence`. A numeric filter selects one id; any other
    /// filter keeps sentences containing it, ignoring case.
    pub fn facts(&self, filter: &str) -> Vec<String> {
        let filter = filter.trim();
        let by_id = filter.parse::<u64>().ok().map(FactId);
        let needle = filter.to_lowercase();
        self.store
            .all()
            .iter()
            .filter(|f| match by_id {
                Some(id) => f.id == id,
                None => true,
            })
            .map(|f| (f.id, render_fact(f, &self.kb)))
            .filter(|(_, s)| by_id.is_some() || s.to_lowercase().contains(&needle))
            .map(|(id, s)| format!("{id}: {s}"))
            .collect()
    }
}
