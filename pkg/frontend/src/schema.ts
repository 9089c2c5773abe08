/** Machine-readable description of the /api/answers response schema.
 *
 * Two consumers: validateResponse() rejects payloads that drift from the
 * documented shape before anything renders, and the contract test walks
 * the same spec to prove the renderers touch no undeclared field.
 */

export type FieldSpec =
  | { kind: "string" }
  | { kind: "number" }
  | { kind: "boolean" }
  | { kind: "nullable"; inner: FieldSpec }
  | { kind: "array"; items: FieldSpec }
  | { kind: "tuple"; items: FieldSpec[] }
  | { kind: "object"; fields: Record<string, FieldSpec> }
  | { kind: "record"; values: FieldSpec };

const str: FieldSpec = { kind: "string" };
const num: FieldSpec = { kind: "number" };
const bool: FieldSpec = { kind: "boolean" };

export const QUERY_RESPONSE_SCHEMA: FieldSpec = {
  kind: "object",
  fields: {
    answers: {
      kind: "array",
      items: {
        kind: "object",
        fields: {
          text: str,
          score: num,
          doc_id: str,
          chunk_index: num,
          passage_char_start: num,
          passage_char_end: num,
          retrieval_rank: { kind: "nullable", inner: num },
          attributions: {
            kind: "array",
            items: { kind: "object", fields: { token: str, weight: num } },
          },
        },
      },
    },
    documents: {
      kind: "array",
      items: {
        kind: "object",
        fields: {
          doc_id: str,
          title: str,
          score: num,
          rank: num,
          highlights: {
            kind: "array",
            items: {
              kind: "object",
              fields: {
                text: str,
                char_start: num,
                char_end: num,
                score: num,
                matches: { kind: "array", items: { kind: "tuple", items: [num, num] } },
              },
            },
          },
        },
      },
    },
    expansion: {
      kind: "object",
      fields: {
        enabled: bool,
        candidates: { kind: "array", items: str },
        terms: {
          kind: "array",
          items: {
            kind: "object",
            fields: { token: str, source_token: str, confidence: num },
          },
        },
        effective_terms: { kind: "array", items: str },
      },
    },
    timings: { kind: "record", values: num },
    warnings: { kind: "array", items: str },
  },
};

export function validate(value: unknown, spec: FieldSpec, path = "$"): string[] {
  switch (spec.kind) {
    case "string":
      return typeof value === "string" ? [] : [`${path}: expected string`];
    case "number":
      return typeof value === "number" ? [] : [`${path}: expected number`];
    case "boolean":
      return typeof value === "boolean" ? [] : [`${path}: expected boolean`];
    case "nullable":
      return value === null ? [] : validate(value, spec.inner, path);
    case "array": {
      if (!Array.isArray(value)) return [`${path}: expected array`];
      return value.flatMap((item, i) => validate(item, spec.items, `${path}[${i}]`));
    }
    case "tuple": {
      if (!Array.isArray(value) || value.length !== spec.items.length) {
        return [`${path}: expected tuple of ${spec.items.length}`];
      }
      return value.flatMap((item, i) => validate(item, spec.items[i], `${path}[${i}]`));
    }
    case "record": {
      if (typeof value !== "object" || value === null || Array.isArray(value)) {
        return [`${path}: expected object`];
      }
      return Object.entries(value).flatMap(([key, item]) =>
        validate(item, spec.values, `${path}.${key}`),
      );
    }
    case "object": {
      if (typeof value !== "object" || value === null || Array.isArray(value)) {
        return [`${path}: expected object`];
      }
      const record = value as Record<string, unknown>;
      return Object.entries(spec.fields).flatMap(([key, fieldSpec]) =>
        key in record
          ? validate(record[key], fieldSpec, `${path}.${key}`)
          : [`${path}.${key}: missing`],
      );
    }
  }
}

/** Every field path declared by the schema, with array steps as "[]". */
export function declaredPaths(spec: FieldSpec, prefix = "$"): Set<string> {
  const paths = new Set<string>([prefix]);
  switch (spec.kind) {
    case "nullable":
      declaredPaths(spec.inner, prefix).forEach((p) => paths.add(p));
      break;
    case "array":
      declaredPaths(spec.items, `${prefix}[]`).forEach((p) => paths.add(p));
      break;
    case "tuple":
      spec.items.forEach((item) =>
        declaredPaths(item, `${prefix}[]`).forEach((p) => paths.add(p)),
      );
      break;
    case "record":
      declaredPaths(spec.values, `${prefix}.*`).forEach((p) => paths.add(p));
      break;
    case "object":
      for (const [key, fieldSpec] of Object.entries(spec.fields)) {
        declaredPaths(fieldSpec, `${prefix}.${key}`).forEach((p) => paths.add(p));
      }
      break;
  }
  return paths;
}
