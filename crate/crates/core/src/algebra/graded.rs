use serde::Serialize;

use super::group::FgAbGroup;

/// A group known through a filtration with the given graded pieces
/// (sub first). `group` is `None` when the extension is not determined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedGroup {
    pub degree: usize,
    pub pieces: Vec<FgAbGroup>,
    pub group: Option<FgAbGroup>,
}

impl GradedGroup {
    /// Extension resolved as the direct sum of the pieces.
    pub fn split(degree: usize, pieces: Vec<FgAbGroup>) -> Self {
        let group = pieces.iter().fold(FgAbGroup::zero(), |a, b| a.direct_sum(b));
        GradedGroup { degree, pieces, group: Some(group) }
    }

    pub fn ambiguous(degree: usize, pieces: Vec<FgAbGroup>) -> Self {
        GradedGroup { degree, pieces, group: None }
    }

    pub fn is_ambiguous(&self) -> bool {
        self.group.is_none()
    }

    /// Rank of the group, which does not depend on the extension.
    pub fn rank(&self) -> usize {
        self.pieces.iter().map(|p| p.free_rank).sum()
    }
}
