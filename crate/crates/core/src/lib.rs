//! Question answering over controlled-English facts, frame knowledge and a
//! city plan.

pub mod city_plan;
pub mod cnl_parser;
pub mod fact_store;
pub mod geometry;
pub mod inference;
pub mod knowledge_base;
pub mod time;
