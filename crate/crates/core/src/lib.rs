//! Exact, finitary computations with familial representations and familial
//! monads on presheaf categories.

pub mod error;
pub mod famrep;
pub mod fincat;
pub mod monad;
pub mod poly;
pub mod presheaf;
pub mod report;
pub mod theory;
pub mod zoo;

pub use error::{FamError, Result};
pub use famrep::{evaluate, Evaluation, FamRep, Family, Op, OperationCell};
pub use fincat::{CatFunctor, FinCategory, Presentation};
pub use monad::{Algebra, MonadRep};
pub use poly::{compose_polynomials, gamma, pd_evaluate, Polynomial};
pub use presheaf::{Presheaf, PresheafMorphism};
pub use report::{Failure, Report, Status};
pub use theory::{check_model, nerve, theory_category, TheorySlice};
