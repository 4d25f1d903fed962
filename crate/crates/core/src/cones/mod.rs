pub mod cone;
pub mod faces;
pub mod space;

pub use cone::Cone;
pub use faces::{angle_cone, angle_cone_of, eps, Face, FaceData};
pub use space::{project, Space, Subspace};
