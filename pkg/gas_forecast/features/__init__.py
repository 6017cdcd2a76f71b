from .driver import (
    BINARY_COLUMNS,
    CONTINUOUS_COLUMNS,
    DailyRecord,
    DatasetView,
    FEATURE_COLUMNS,
    FeatureMatrix,
    HDD_BASE,
    Scaler,
    build_matrix,
    build_row,
    dump_features,
    frame_to_records,
    hdd,
    read_features,
    records_to_frame,
    temperature_series,
    WEEKDAY_COLUMNS,
)
