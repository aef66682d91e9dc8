//! Bottom-up reorganization: roll single-child chains, bind small subtrees,
//! promote small classes, then cap large classes by subsampling. The order is
//! fixed.

mod ops;
mod subsample;
mod tree;

use crate::error::{Error, Result};
use crate::labelmap::LabelMap;
use crate::taxonomy::Taxonomy;

pub use ops::{bind, promote, roll};
pub use subsample::{
    expand_train_list, parse_image_lists, select_indices, subsample_plan, PlanEntry, SubsamplePlan,
    SELECTION_RULE,
};
pub use tree::{ClassNode, ClassTree, Member, MergeLog, MergeOp, MergeRecord};

/// Thresholds for the bottom-up pipeline, in images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReorgConfig {
    /// Subtrees with fewer images are bound into one class.
    pub bind_threshold: u64,
    /// Classes with fewer images are promoted into their parent.
    pub promote_threshold: u64,
    /// Classes keep at most this many images.
    pub subsample_cap: u64,
    pub seed: u64,
}

impl ReorgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subsample_cap == 0 {
            return Err(Error::contract("subsample cap (t_s) must be at least 1"));
        }
        Ok(())
    }

    pub fn provenance(&self) -> String {
        format!(
            "bottomup t_b={} t_p={} t_s={} seed={} order=roll,bind,promote,subsample",
            self.bind_threshold, self.promote_threshold, self.subsample_cap, self.seed
        )
    }
}

/// The three bottom-up settings evaluated on full ImageNet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BottomUpPreset {
    /// About 4.4k classes.
    Classes4k,
    /// About 8.2k classes.
    Classes8k,
    /// About 13k classes.
    Classes13k,
}

impl BottomUpPreset {
    pub fn config(self, seed: u64) -> ReorgConfig {
        let (bind_threshold, promote_threshold) = match self {
            BottomUpPreset::Classes4k => (7_000, 1_250),
            BottomUpPreset::Classes8k => (7_000, 500),
            BottomUpPreset::Classes13k => (3_000, 200),
        };
        ReorgConfig {
            bind_threshold,
            promote_threshold,
            subsample_cap: 2_000,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BottomUpResult {
    pub label_map: LabelMap,
    pub plan: SubsamplePlan,
    pub log: MergeLog,
    pub tree: ClassTree,
}

/// Runs roll, bind, promote and subsample in that order.
pub fn bottom_up_pipeline(taxonomy: &Taxonomy, config: &ReorgConfig) -> Result<BottomUpResult> {
    config.validate()?;
    let start = ClassTree::from(taxonomy);
    let (rolled, mut log) = roll(&start);
    let (bound, bind_log) = bind(&rolled, config.bind_threshold);
    let (promoted, promote_log) = promote(&bound, config.promote_threshold);
    log.extend(bind_log);
    log.extend(promote_log);
    let label_map = promoted.to_label_map(config.provenance());
    let plan = subsample_plan(&label_map, config.subsample_cap, config.seed)?;
    Ok(BottomUpResult {
        label_map,
        plan,
        log,
        tree: promoted,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::taxonomy::{build_taxonomy, SynsetId};

    fn id(s: &str) -> SynsetId {
        SynsetId::new(s).unwrap()
    }

    #[test]
    fn presets() {
        assert_eq!(
            BottomUpPreset::Classes4k.config(1),
            ReorgConfig {
                bind_threshold: 7000,
                promote_threshold: 1250,
                subsample_cap: 2000,
                seed: 1
            }
        );
        assert_eq!(BottomUpPreset::Classes8k.config(1).promote_threshold, 500);
        let c13 = BottomUpPreset::Classes13k.config(1);
        assert_eq!((c13.bind_threshold, c13.promote_threshold), (3000, 200));
    }

    #[test]
    fn running_example_pipeline() {
        let edges: Vec<_> = [
            ("R", "A"),
            ("R", "B"),
            ("R", "C"),
            ("A", "A1"),
            ("A", "A2"),
            ("B", "B1"),
            ("B1", "B2"),
        ]
        .iter()
        .map(|(p, c)| (id(p), id(c)))
        .collect();
        let counts: BTreeMap<_, _> = [
            ("A", 10),
            ("A1", 3),
            ("A2", 4),
            ("B", 1),
            ("B1", 2),
            ("B2", 5),
            ("C", 100),
        ]
        .iter()
        .map(|(s, c)| (id(s), *c))
        .collect();
        let t = build_taxonomy(&edges, &counts, &BTreeMap::new()).unwrap();
        let cfg = ReorgConfig {
            bind_threshold: 20,
            promote_threshold: 10,
            subsample_cap: 50,
            seed: 3,
        };
        let out = bottom_up_pipeline(&t, &cfg).unwrap();
        assert_eq!(
            out.label_map.to_text(),
            "#labelmap\tv1\tbottomup t_b=20 t_p=10 t_s=50 seed=3 order=roll,bind,promote,subsample\n\
             0\tA\t17\tA,A1,A2\n\
             1\tC\t100\tC\n\
             #UNASSIGNED\n\
             B\t1\nB1\t2\nB2\t5\nR\t0\n"
        );
        assert_eq!(out.plan.entries[1].target_count, 50);
        let ops: Vec<&str> = out.log.records.iter().map(|r| r.op.name()).collect();
        assert_eq!(ops, ["roll", "roll", "bind", "bind", "promote"]);
    }

    #[test]
    fn single_node_taxonomy() {
        // A lone edge rolls into one class.
        let t = build_taxonomy(
            &[(id("R"), id("A"))],
            &[(id("A"), 4)].into(),
            &BTreeMap::new(),
        )
        .unwrap();
        let cfg = ReorgConfig {
            bind_threshold: 0,
            promote_threshold: 0,
            subsample_cap: 10,
            seed: 0,
        };
        let out = bottom_up_pipeline(&t, &cfg).unwrap();
        assert_eq!(out.label_map.len(), 1);
        assert_eq!(out.label_map.classes[0].assigned_count, 4);
        assert_eq!(out.plan.entries[0].target_count, 4);
    }

    #[test]
    fn zero_cap_rejected() {
        let t = build_taxonomy(&[(id("R"), id("A"))], &BTreeMap::new(), &BTreeMap::new()).unwrap();
        let cfg = ReorgConfig {
            bind_threshold: 0,
            promote_threshold: 0,
            subsample_cap: 0,
            seed: 0,
        };
        assert!(bottom_up_pipeline(&t, &cfg).is_err());
    }
}
