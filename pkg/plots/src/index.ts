export { SchemaError } from "./errors";
export { NumericTable, column, readNumericCsv } from "./csv";
export { FigureKind, FigureSpec, SeriesInput, parseFigureSpec } from "./figspec";
export { renderFigure, renderToFile } from "./render";
export { Scale, Tick, labelNum, linearScale, logScale, symlogScale } from "./svg";
