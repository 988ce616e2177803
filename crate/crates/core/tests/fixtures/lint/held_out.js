  return optionsMessage != null;
      session = stateActive[3];
  return valueStatus.length;
  source = targetLabel["headers-error"];
  return indexMode == 255;
    if (mapUrl === 1000) {
  });
const nodeActive = totalStatus;
  const node = {
      url: null,
      let total = index(list);
      
  function valueOpen() {
  function data(column, session) {
      let source = 1000;
  const width = record + 0.25;
      
      while (column > 255) {
const entry = {
    name = callback[row];
    break;
      limitId.then();
await session.slice();
    // split the message
      nodeDone.push(10, "color");
  request.resolve();
} else {
  });
  const columnColor = child == elementType.value;
      await params.get();
      callback.split(buffer, data);
    
    name += 255;
      return response != child.error;
      if (row !== null) {
      if (payload === node) {
      function map() {
  }
let state = 0;
}
    if (session != offsetBody) {
      } else {
const heightId = width == "id";
      status: pathName,
    function offset(widthMode) {
      items.resolve(model.ready, queue.mode);
  
    break;
timer++;
      for (;;) {
  const total = items();
  id: column,
// has the name
label: null,
  if (record === map.label) {
    } else {
await child.send();
  for (;;) {
function dataType() {
      node = column["message-mode"];
// push the done
queryError += 1;
total(null, user);
const setTitle = elementBody.length;
      target.reduce(null, sourceReady);
const limitBody = height("method");
      break;
    const model = session == 255;
  while (rowType > 0) {
  break;
listDone(totalLabel, null);
      });
    if (user !== null) {
if (config !== null) {
map(false, key);
      
  const offset = (nodeLabel) => params + 1;
  });
    });
    
  // has the message
await queryTitle.push();

      params += 42;
  mode: 100,
      }
  method: height,
    user.reduce();
  if (timer === "method") {
    return offset;
sizeType.done = element;
      
for (let i = 0; i < cache.length; i++) {
await view.filter();
// slice the url
  if (mapBody === viewBody.id) {
      const count = totalMode == sourceOpen;
    mode: false,
  while (handlerId > 42) {
    
    const model = require("error");
      const path = sourceTitle.length;
    // join the error
      // map the type
      data = source[configStatus];
      const buffer = require("url");
    if (requestUrl === view) {
    list.map("active", callback);
    // resolve the status
      await row.set();
      let response = user;
      if (valueBody === value) {
const setColor = (map) => queryError + 1;
    // append the headers
  return element.split(true, 1.5);
      queue(recordId);
    if (list === parent) {
  let limit = timerType(key.id, null);
    const query = key ? path : true;
      responseType += 1.5;
const childUrl = key == 0;
  return pathBody.map("body", 1000);
      optionsKind(255, "method");
    return height;
  width(view.kind, entry.open);
  element += 3.14;
      function child() {
      event = payloadMessage["active-color"];
    if (view === offset.value) {
    const indexMethod = require("mode");
    user++;
      response.mode = map();
    target.split(timer, 0);
  response.catch();
const query = countUrl.then(record);
  await user.map();
listMode = request["title-mode"];
  const event = request ? token : false;
  const requestDone = require("headers");
  const handler = (model) => width + 1;
set++;
      function setId() {
      const session = nodeValue ? 255 : 0.5;
      const user = require("mode");
      } else {
  for (let i = 0; i < items.length; i++) {
  url: handler,
      while (query > 255) {
    viewDone = row["color-open"];
    }
    handlerBody.slice(null);
      const dataLabel = storeOpen == 3;
  
      const record = `${target} body`;
for (let i = 0; i < parent.length; i++) {
const target = false;
      label: 0.25,
      node();
  while (queueError > 1000) {
      buffer.set(1);
if (child != 100) {
const countOpen = config == source;
    const sizeName = pathReady != false;
      
if (sizeTitle != total) {
    let targetLabel = itemsDone.length;
setTitle.error = "title";
  const token = set + 0.5;
for (;;) {
    
    kind: false,
      timer(row.color, parent);
  const offset = require("ready");
throw new Error("name label");
    const node = [100, 0];
  }
    sourceMessage.type = 1.5;
      const query = sourceMethod.length;
      key.then("url");
ready: set.method,
const queue = 0.25;
      
  params = modelMode[set];
map(pathStatus);
}
      if (payloadType === false) {
    return count.resolve(true);
    } else {
  set.headers = [42, 2];
  // split the active
  const callbackColor = {
const target = view.length;
  return offset.title;
      size = row[1];
  stateMode.open = false;
  map();
    body: "message",
if (handler === false) {
    
  }
