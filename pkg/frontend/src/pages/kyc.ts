/**
 * KYC onboarding page: a four-group form, client-side validation with the
 * node's message strings, an explicit approval dialog before anything leaves
 * the browser, and a table of records registered this session with their
 * transaction addresses.
 */

import { ServerError } from "../api";
import {
  emptyRecord,
  fileSha256Hex,
  REQUIRED_FIELDS,
  validateKyc,
  type RegistrationRecord,
  type ValidationFailure,
} from "../kyc";
import { connectWallet, type Session } from "../session";

interface FieldSpec {
  name: string; // DOM name, form wording
  label: string;
  record: keyof RegistrationRecord | null; // null: not part of the signed record
  kind: "text" | "select" | "number" | "file";
  options?: string[];
  placeholder?: string;
}

const GROUPS: { legend: string; fields: FieldSpec[] }[] = [
  {
    legend: "Personal Information",
    fields: [
      { name: "firstName", label: "First Name", record: "firstName", kind: "text" },
      { name: "lastName", label: "Last Name", record: "lastName", kind: "text" },
      { name: "middleName", label: "Middle Name", record: "middleName", kind: "text" },
      { name: "dob", label: "Date of Birth", record: "dob", kind: "text", placeholder: "YYYY-MM-DD" },
      { name: "email", label: "Email", record: "email", kind: "text" },
      { name: "phone", label: "Phone Number", record: "phone", kind: "text" },
      {
        name: "maritalStatus",
        label: "Marital Status",
        record: "maritalStatus",
        kind: "select",
        options: ["Single", "Married", "Divorced", "Widowed"],
      },
    ],
  },
  {
    legend: "Address Information",
    fields: [
      { name: "street", label: "Street", record: "address_", kind: "text" },
      { name: "city", label: "City", record: "city", kind: "text" },
      { name: "state", label: "State", record: "state", kind: "text" },
      { name: "country", label: "Country", record: "country", kind: "text" },
      { name: "zip", label: "ZIP Code", record: "zip", kind: "text" },
    ],
  },
  {
    legend: "Additional Information",
    fields: [
      { name: "nationality", label: "Nationality", record: "nationality", kind: "text" },
      { name: "occupation", label: "Occupation", record: "occupation", kind: "text" },
      {
        name: "employmentStatus",
        label: "Employment Status",
        record: "employmentStatus",
        kind: "select",
        options: ["Employed", "Self-Employed", "Unemployed", "Student", "Retired"],
      },
      { name: "annualIncome", label: "Annual Income", record: "annualIncome", kind: "number" },
    ],
  },
  {
    legend: "Identification Information",
    fields: [
      {
        name: "idType",
        label: "ID Type",
        record: "idType",
        kind: "select",
        options: ["Passport", "Driver's License", "National ID"],
      },
      { name: "idNumber", label: "ID Number", record: "idNumber", kind: "text" },
      { name: "idExpiry", label: "ID Expiry Date", record: "idExpiry", kind: "text", placeholder: "YYYY-MM-DD" },
      { name: "idFile", label: "ID Document", record: null, kind: "file" },
    ],
  },
];

const REQUIRED_RECORD_KEYS = new Set<string>(REQUIRED_FIELDS.map(([name]) => name));

// record key -> DOM name (they differ only for the street line)
const DOM_NAME: Record<string, string> = {};
for (const group of GROUPS) {
  for (const field of group.fields) {
    if (field.record) DOM_NAME[field.record] = field.name;
  }
}

function controlHtml(field: FieldSpec): string {
  const required = field.record !== null && REQUIRED_RECORD_KEYS.has(field.record);
  const req = required ? " required" : "";
  const star = required ? ' <span class="req">*</span>' : "";
  let control: string;
  if (field.kind === "select") {
    const options = (field.options ?? [])
      .map((opt) => `<option value="${opt}">${opt}</option>`)
      .join("");
    control = `<select name="${field.name}"${req}><option value="">Select...</option>${options}</select>`;
  } else if (field.kind === "file") {
    control = `<input name="${field.name}" type="file" />`;
  } else {
    const placeholder = field.placeholder ? ` placeholder="${field.placeholder}"` : "";
    control = `<input name="${field.name}" type="${field.kind}"${placeholder}${req} />`;
  }
  return `
    <label class="field">
      <span class="field-label">${field.label}${star}</span>
      ${control}
      <span class="field-error" data-error-for="${field.name}" hidden></span>
    </label>
  `;
}

/** Modal approval step; resolves false when the user rejects. */
function requestApproval(host: HTMLElement, summary: string): Promise<boolean> {
  return new Promise((resolve) => {
    const overlay = document.createElement("div");
    overlay.className = "approval-overlay";
    overlay.innerHTML = `
      <div class="approval-dialog" role="dialog" aria-modal="true">
        <h3>Confirm KYC Submission</h3>
        <p data-role="approval-summary"></p>
        <p>Send this encrypted record to the bank node?</p>
        <div class="approval-actions">
          <button class="primary" data-action="approve">Approve</button>
          <button data-action="reject">Reject</button>
        </div>
      </div>
    `;
    (overlay.querySelector('[data-role="approval-summary"]') as HTMLElement).textContent = summary;
    const done = (ok: boolean) => {
      overlay.remove();
      resolve(ok);
    };
    (overlay.querySelector('[data-action="approve"]') as HTMLButtonElement).addEventListener(
      "click",
      () => done(true),
    );
    (overlay.querySelector('[data-action="reject"]') as HTMLButtonElement).addEventListener(
      "click",
      () => done(false),
    );
    host.appendChild(overlay);
  });
}

export function renderKycPage(root: HTMLElement, session: Session): void {
  const groupsHtml = GROUPS.map(
    (group) => `
      <fieldset>
        <legend>${group.legend}</legend>
        ${group.fields.map(controlHtml).join("")}
      </fieldset>
    `,
  ).join("");

  root.innerHTML = `
    <section class="card kyc-card">
      <h2>KYC Registration</h2>
      <div class="wallet-row">
        <button data-action="connect">Connect Wallet</button>
        <span class="address" data-role="wallet-address"></span>
      </div>
      <form data-role="kyc-form" novalidate>
        ${groupsHtml}
        <button type="submit" class="primary" data-action="submit">Submit KYC</button>
      </form>
      <p class="status" data-role="status"></p>
      <div class="result" data-role="result" hidden>
        <p>KYC token: <code data-role="kyc-token"></code></p>
        <p>Transaction address: <code data-role="tx-address"></code></p>
      </div>
      <h3>Registered KYC Records</h3>
      <table data-role="registered">
        <thead>
          <tr><th>Name</th><th>Transaction Address</th><th>KYC Token</th></tr>
        </thead>
        <tbody></tbody>
      </table>
    </section>
  `;

  const form = root.querySelector('[data-role="kyc-form"]') as HTMLFormElement;
  const connectBtn = root.querySelector('[data-action="connect"]') as HTMLButtonElement;
  const submitBtn = root.querySelector('[data-action="submit"]') as HTMLButtonElement;
  const addressEl = root.querySelector('[data-role="wallet-address"]') as HTMLElement;
  const statusEl = root.querySelector('[data-role="status"]') as HTMLElement;
  const resultEl = root.querySelector('[data-role="result"]') as HTMLElement;
  const tableBody = root.querySelector('[data-role="registered"] tbody') as HTMLElement;

  if (session.loggedIn && session.wallet) {
    addressEl.textContent = Array.from(session.wallet.address, (b) =>
      b.toString(16).padStart(2, "0"),
    ).join("");
  }

  connectBtn.addEventListener("click", async () => {
    connectBtn.disabled = true;
    try {
      addressEl.textContent = await connectWallet(session);
      statusEl.textContent = "";
    } catch (err) {
      statusEl.textContent = (err as Error).message;
    } finally {
      connectBtn.disabled = false;
    }
  });

  const fieldValue = (name: string): string =>
    (form.querySelector(`[name="${name}"]`) as HTMLInputElement | HTMLSelectElement).value;

  const collectRecord = (): RegistrationRecord => {
    const record = emptyRecord();
    for (const [key, domName] of Object.entries(DOM_NAME)) {
      if (key === "annualIncome") {
        const raw = fieldValue(domName).trim();
        record.annualIncome = raw === "" ? 0 : Number(raw);
      } else {
        (record as unknown as Record<string, string>)[key] = fieldValue(domName);
      }
    }
    return record;
  };

  const clearFieldErrors = () => {
    for (const el of Array.from(form.querySelectorAll("[data-error-for]"))) {
      (el as HTMLElement).hidden = true;
      el.textContent = "";
    }
  };

  const showFailures = (failures: Iterable<ValidationFailure>) => {
    for (const [recordKey, message] of failures) {
      const domName = DOM_NAME[recordKey] ?? recordKey;
      const slot = form.querySelector(`[data-error-for="${domName}"]`) as HTMLElement | null;
      if (slot) {
        slot.hidden = false;
        slot.textContent = message;
      }
    }
  };

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    clearFieldErrors();
    resultEl.hidden = true;
    statusEl.textContent = "";

    if (!session.loggedIn || !session.wallet) {
      statusEl.textContent = "Connect your wallet first";
      return;
    }
    const record = collectRecord();
    const failures = validateKyc(record);
    if (failures.length > 0) {
      showFailures(failures);
      statusEl.textContent = "Please fix the highlighted fields";
      return;
    }

    const approved = await requestApproval(
      root,
      `Register ${record.firstName} ${record.lastName}, ${record.idType} ${record.idNumber}`,
    );
    if (!approved) {
      statusEl.textContent = "Submission cancelled; nothing was sent";
      return;
    }

    submitBtn.disabled = true;
    try {
      const fileInput = form.querySelector('[name="idFile"]') as HTMLInputElement;
      const file = fileInput.files && fileInput.files[0];
      const digest = file ? await fileSha256Hex(file) : undefined;
      const receipt = await session.client.submitKyc(session.wallet, record, digest);
      statusEl.textContent = "KYC registered";
      resultEl.hidden = false;
      (resultEl.querySelector('[data-role="kyc-token"]') as HTMLElement).textContent =
        receipt.kyc_token ?? "";
      (resultEl.querySelector('[data-role="tx-address"]') as HTMLElement).textContent =
        receipt.tx_id;
      const row = document.createElement("tr");
      for (const text of [
        `${record.firstName} ${record.lastName}`.trim(),
        receipt.tx_id,
        receipt.kyc_token ?? "",
      ]) {
        const cell = document.createElement("td");
        cell.textContent = text;
        row.appendChild(cell);
      }
      tableBody.appendChild(row);
    } catch (err) {
      if (err instanceof ServerError && Array.isArray(err.body.failures)) {
        showFailures(err.body.failures as ValidationFailure[]);
      }
      statusEl.textContent = (err as Error).message;
    } finally {
      submitBtn.disabled = false;
    }
  });
}
