//! Dense complex linear algebra kernels.

mod eigen;
mod expm;
mod io;
mod operator;
mod resolvent;

pub use eigen::{eig, eigenvalues, EigenCluster, EigenSystem, CLUSTER_REL_TOL, EIG_RESIDUAL_TOL, RANK_REL_TOL};
pub(crate) use eigen::svd_ascending;
pub use expm::{expm, expm_dense, expm_real};
pub use io::{parse_complex, parse_csv_matrix, parse_json_matrix, read_matrix_file};
pub use operator::{norm_inf, norm_inf_real, to_complex, CMatrix, CVector, ComplexVector, SquareOperator, MAX_DENSE_DIM, REALITY_TOL};
pub use resolvent::{neumann_resolvent, resolvent, resolvent_real, singular_tol, NeumannResult};
