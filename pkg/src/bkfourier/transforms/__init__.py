from .cone import (
    ConeBall,
    ConeContext,
    ConeFunction,
    ConeTransformResult,
    cone_ball_integral,
    cone_inner,
    cone_norm,
    cone_pairing,
    cone_transform,
    lift_to_cone,
    make_ball,
    plancherel_defect,
    random_cone_function,
)
from .normalizing import FiberFunction, MuResult, mu_operator
from .weil import (
    WeilRepContext,
    relation_words,
    tensor_difference,
    weil_rep_apply,
    weil_rep_apply_tensor,
    word_matrix,
)
from .ytransform import (
    BudgetExceeded,
    YBudget,
    YContext,
    YFunction,
    YTransformResult,
    calibrate_c,
    gauss_ball_integral,
    plane_integral,
    random_y_function,
    y_involution_defect,
    y_pairing,
    y_plancherel_defect,
    y_transform,
)
