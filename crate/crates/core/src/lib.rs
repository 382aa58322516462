pub mod consistency;
pub mod domain;
pub mod dsl;
pub mod experiment;
pub mod learner;
pub mod model;
pub mod rectangles;
pub mod regret;
pub mod server;
pub mod session;
pub mod trip;
pub mod user;
