//! Finest factorization of pure states and the three-qubit support table.

mod factorize;
mod table3;

pub use factorize::{
    assemble, finest_factorization, random_block_product, FactorBlock, FactorizationTree,
    Partition, MAX_FACTORIZE_QUBITS,
};
pub use table3::{
    classify_support_3q, compare_golden, draw_branch, draw_generic, generate_table_3q,
    parse_golden, part_columns, part_minors, part_status, support_rule_3q,
    verify_pairwise_conditions_3q, Branch, Class3, GoldenRow, GroupKey, MinorCondition,
    PartConditionReport, PartStatus, Support, SupportClass, SupportRule, Table3, TableRow,
    BUNDLED_GOLDEN,
};
