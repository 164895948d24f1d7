from .normalizer import (
    NormalizingData,
    ParabolicDatum,
    Sl2Content,
    build_parabolic,
    check_delta_relation,
    dual_request,
    normalizing_data,
    normalizing_data_for,
    sl2_decompose,
)
from .oracles import closed_form_oracle, family_system
from .roots import RootSystem
from .tables import diff_tables, load_golden
